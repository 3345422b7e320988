//! Parametric families of orthogonal permutative matrices.
//!
//! Every 4×4 OPM is `P̄·C·M·C` where `P̄` fixes 1, `C` is one of
//! `I, P_(23), P_(24)` (the letters X, Y, Z) and `M` is one of the block
//! matrices `M±_{x,z}`, `N±_{x,z}` on a conic, or one of the sporadic
//! matrices `±P_τ`, `±(½J − P_τ)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{Mat, Mat2, Mat3, Mat4};
use crate::perm::{p4, Perm3, Perm4};
use crate::scalar::{Field, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<F: Field>(self) -> F {
        match self {
            Sign::Plus => F::one(),
            Sign::Minus => -F::one(),
        }
    }

    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::OutOfRange(format!("sign must be +1 or -1, got {v}"))),
        }
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("bad sign {other:?}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The block layouts `M+`, `M−`, `N+`, `N−`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    MPlus,
    MMinus,
    NPlus,
    NMinus,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::MPlus, Kind::MMinus, Kind::NPlus, Kind::NMinus];

    fn sign(self) -> Sign {
        match self {
            Kind::MPlus | Kind::NPlus => Sign::Plus,
            Kind::MMinus | Kind::NMinus => Sign::Minus,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Kind::MPlus => 1,
            Kind::MMinus => 2,
            Kind::NPlus => 3,
            Kind::NMinus => 4,
        }
    }
}

/// The three symbolic patterns, distinguished by the conjugating permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    /// `C` in `P̄·C·M·C`.
    pub fn conjugator(self) -> Perm4 {
        match self {
            Letter::X => Perm4::identity(),
            Letter::Y => p4("(23)"),
            Letter::Z => p4("(24)"),
        }
    }

    /// Left factor of the commutative subgroup and of the group chains.
    pub fn chain_prefix(self) -> Perm4 {
        match self {
            Letter::X => p4("(34)"),
            Letter::Y => p4("(24)"),
            Letter::Z => p4("(23)"),
        }
    }

    /// Pairwise H-orthogonal permutations carrying `(x, y, z, w)`.
    pub fn quadruple(self) -> [Perm4; 4] {
        match self {
            Letter::X => [p4("(34)"), p4("(12)"), p4("(13)(24)"), p4("(14)(23)")],
            Letter::Y => [p4("(24)"), p4("(12)(34)"), p4("(13)"), p4("(14)(23)")],
            Letter::Z => [p4("(23)"), p4("(12)(34)"), p4("(13)(24)"), p4("(14)")],
        }
    }

    /// 4-cycle `P` with `chain_prefix·(letter, 3) = {xI + yP + zP² + wP³}`.
    pub fn cyclic_generator(self) -> Perm4 {
        match self {
            Letter::X => p4("(1324)"),
            Letter::Y => p4("(1234)"),
            Letter::Z => p4("(1342)"),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One of the twelve sets `X1..X4`, `Y1..Y4`, `Z1..Z4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyId {
    pub letter: Letter,
    pub j: u8,
}

impl FamilyId {
    pub fn new(letter: Letter, j: u8) -> Result<Self> {
        if !(1..=4).contains(&j) {
            return Err(Error::OutOfRange(format!("family index {j} not in 1..4")));
        }
        Ok(FamilyId { letter, j })
    }

    pub fn all() -> Vec<FamilyId> {
        Letter::ALL
            .iter()
            .flat_map(|&letter| (1..=4).map(move |j| FamilyId { letter, j }))
            .collect()
    }

    pub fn kind(self) -> Kind {
        Kind::ALL[(self.j - 1) as usize]
    }

    /// Common row and column sum of the members.
    pub fn line_sum(self) -> i64 {
        if self.j % 2 == 1 {
            1
        } else {
            -1
        }
    }

    /// Determinant shared by all members.
    pub fn det_class(self) -> i64 {
        if self.j <= 2 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter, self.j)
    }
}

impl FromStr for FamilyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let letter = match chars.next() {
            Some('X' | 'x') => Letter::X,
            Some('Y' | 'y') => Letter::Y,
            Some('Z' | 'z') => Letter::Z,
            _ => return Err(Error::Parse(format!("bad family name {s:?}"))),
        };
        let rest: String = chars.collect();
        let j: u8 = rest.parse().map_err(|_| Error::Parse(format!("bad family name {s:?}")))?;
        FamilyId::new(letter, j)
    }
}

impl Serialize for FamilyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FamilyId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Conic parameters. The second coordinate is called `y` in the Y and Z
/// families; it is stored here as `z` throughout.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint<F> {
    pub x: F,
    pub z: F,
}

impl<F: Field> ParamPoint<F> {
    pub fn new(x: F, z: F) -> Self {
        ParamPoint { x, z }
    }

    pub fn swapped(&self) -> Self {
        ParamPoint { x: self.z.clone(), z: self.x.clone() }
    }

    pub fn to_f64(&self) -> ParamPoint<f64> {
        ParamPoint { x: self.x.to_f64(), z: self.z.to_f64() }
    }
}

/// `x² + z² ∓ z` for `M±`, `x² + z² ∓ x` for `N±`.
pub fn constraint_residual<F: Field>(kind: Kind, p: &ParamPoint<F>) -> F {
    let base = p.x.square() + p.z.square();
    match kind {
        Kind::MPlus => base - p.z.clone(),
        Kind::MMinus => base + p.z.clone(),
        Kind::NPlus => base - p.x.clone(),
        Kind::NMinus => base + p.x.clone(),
    }
}

fn a_block<F: Field>(t: &F) -> Mat2<F> {
    Mat::from_rows([[t.clone(), -t.clone()], [-t.clone(), t.clone()]])
}

fn b_block<F: Field>(s: Sign, t: &F) -> Mat2<F> {
    let off = s.value::<F>() - t.clone();
    Mat::from_rows([[t.clone(), off.clone()], [off, t.clone()]])
}

fn f_block<F: Field>() -> Mat2<F> {
    Mat::from_ints([[0, 1], [1, 0]], 1)
}

/// `M±_{x,z} = [[A_x, B±_z], [B±_z, −A_x]]` or `N±_{x,z} = [[B±_x, A_z], [A_z, F·B±_x]]`.
///
/// The conic constraint is not checked.
pub fn mn_matrix<F: Field>(kind: Kind, x: &F, z: &F) -> Mat4<F> {
    let s = kind.sign();
    match kind {
        Kind::MPlus | Kind::MMinus => {
            let a = a_block(x);
            let b = b_block(s, z);
            Mat::from_blocks(&a, &b, &b, &-a.clone())
        }
        Kind::NPlus | Kind::NMinus => {
            let b = b_block(s, x);
            let a = a_block(z);
            let fb = f_block::<F>().matmul(&b);
            Mat::from_blocks(&b, &a, &a, &fb)
        }
    }
}

/// `P̄·C·M·C` for the family `fid` at `p`, rejecting points off the conic.
pub fn family_element<F: Field>(fid: FamilyId, p: &ParamPoint<F>, pbar: &Perm4, tol: f64) -> Result<Mat4<F>> {
    if !pbar.fixes(0) {
        return Err(Error::PrefixMovesOne(pbar.to_string()));
    }
    let kind = fid.kind();
    let res = constraint_residual(kind, p);
    let tol = if F::EXACT { 0.0 } else { tol };
    if !res.near_zero(tol) {
        return Err(Error::Constraint { residual: res.to_string() });
    }
    let c = fid.letter.conjugator();
    let m = mn_matrix(kind, &p.x, &p.z);
    Ok(m.permuted(&c, &c).permute_rows(pbar))
}

/// `½J₄ − I₄`.
pub fn grover<F: Field>() -> Mat4<F> {
    Mat::from_ints([[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]], 2)
}

/// `(½ sin θ, −(r/2)(1 − r cos θ))`, on the circle `x² + z² + r z = 0`.
pub fn trig_point(theta: f64, r: Sign) -> Result<ParamPoint<f64>> {
    check_theta(theta)?;
    let r = r.value::<f64>();
    Ok(ParamPoint { x: 0.5 * theta.sin(), z: -(r / 2.0) * (1.0 - r * theta.cos()) })
}

fn check_theta(theta: f64) -> Result<()> {
    let pi = std::f64::consts::PI;
    if !(theta.is_finite() && (-pi - 1e-12..=pi + 1e-12).contains(&theta)) {
        return Err(Error::OutOfRange(format!("theta {theta} outside [-pi, pi]")));
    }
    Ok(())
}

/// The one-parameter deformations of the Grover matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrigFamily {
    X1,
    Y1,
    Z1,
}

impl TrigFamily {
    pub fn letter(self) -> Letter {
        match self {
            TrigFamily::X1 => Letter::X,
            TrigFamily::Y1 => Letter::Y,
            TrigFamily::Z1 => Letter::Z,
        }
    }

    /// Point of the `(letter, 1)` family at which `family_element` agrees with
    /// [`trig_family`]. The Z display uses the second coordinate `1 − z`.
    pub fn family_point(self, theta: f64) -> Result<ParamPoint<f64>> {
        let p = trig_point(theta, Sign::Minus)?;
        Ok(match self {
            TrigFamily::Z1 => ParamPoint { x: p.x, z: 1.0 - p.z },
            _ => p,
        })
    }
}

/// Explicit trigonometric matrices with `s = ½ sin θ`, `c± = ½(1 ± cos θ)`.
pub fn trig_family(theta: f64, which: TrigFamily) -> Result<Mat4<f64>> {
    check_theta(theta)?;
    let s = 0.5 * theta.sin();
    let p = 0.5 * (1.0 + theta.cos());
    let m = 0.5 * (1.0 - theta.cos());
    let rows = match which {
        TrigFamily::X1 => [[s, -s, p, m], [-s, s, m, p], [p, m, -s, s], [m, p, s, -s]],
        TrigFamily::Y1 => [[s, p, -s, m], [p, -s, m, s], [-s, m, s, p], [m, s, p, -s]],
        TrigFamily::Z1 => [[s, p, m, -s], [p, -s, s, m], [m, s, -s, p], [-s, m, p, s]],
    };
    Ok(Mat::from_rows(rows))
}

/// Rational point `x = (r²−1)/(2(r²+1))`, `z = s·½ + b·r/(r²+1)` on
/// `x² + z² − s·z = 0`.
pub fn rational_point(r: &Q, s: Sign, branch: Sign) -> Result<ParamPoint<Q>> {
    if Field::near_zero(r, 0.0) {
        return Err(Error::OutOfRange("r must be nonzero".into()));
    }
    let r2 = r.square();
    let one = Q::one();
    let x = (r2.clone() - one.clone()) / (Q::from_i64(2) * (r2.clone() + one.clone()));
    let z = s.value::<Q>() * Q::ratio(1, 2) + branch.value::<Q>() * r.clone() / (r2 + one);
    Ok(ParamPoint { x, z })
}

/// Rational point on the conic of `fid`: [`rational_point`] for the `M`
/// layouts, with coordinates exchanged for the `N` layouts.
pub fn rational_point_for(fid: FamilyId, r: &Q, branch: Sign) -> Result<ParamPoint<Q>> {
    let kind = fid.kind();
    let p = rational_point(r, kind.sign(), branch)?;
    Ok(match kind {
        Kind::MPlus | Kind::MMinus => p,
        Kind::NPlus | Kind::NMinus => p.swapped(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SporadicKind {
    Plain,
    HalfJ,
}

/// `±P_τ` or `±(½J₄ − P_τ)`.
pub fn sporadic_opm<F: Field>(tau: &Perm4, sign: Sign, kind: SporadicKind) -> Mat4<F> {
    let p = tau.to_matrix::<F>();
    let m = match kind {
        SporadicKind::Plain => p,
        SporadicKind::HalfJ => Mat4::<F>::all_ones().scale(&F::ratio(1, 2)) - p,
    };
    m.scale(&sign.value())
}

/// The sets `𝒞₁`, `𝒞₂` of non-permutative orthogonal matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CSet {
    C1,
    C2,
}

impl CSet {
    /// Admissible interval for `c₂`.
    pub fn interval(self) -> (Q, Q) {
        match self {
            CSet::C1 => (Q::from_i64(-1), Q::ratio(1, 3)),
            CSet::C2 => (Q::ratio(-1, 3), Q::from_i64(1)),
        }
    }

    /// `(1 − 3c)(1 + c)` for `𝒞₁`, `(1 + 3c)(1 − c)` for `𝒞₂`.
    pub fn discriminant<F: Field>(self, c2: &F) -> F {
        let one = F::one();
        let three = F::from_i64(3);
        match self {
            CSet::C1 => (one.clone() - three * c2.clone()) * (one + c2.clone()),
            CSet::C2 => (one.clone() + three * c2.clone()) * (one - c2.clone()),
        }
    }

    /// `a₄ = −c₂/2 ± ½√disc`, or `None` if the root is unavailable in `F`.
    pub fn a4<F: Field>(self, c2: &F, branch: Sign) -> Option<F> {
        let root = self.discriminant(c2).sqrt()?;
        let half = F::ratio(1, 2);
        Some(-(half.clone() * c2.clone()) + branch.value::<F>() * half * root)
    }

    /// Rational `c₂` with a square discriminant, parametrized by `k`.
    pub fn rational_c2(self, k: &Q) -> Q {
        let k2 = k.square();
        match self {
            CSet::C1 => (Q::one() - k2.clone()) / (Q::from_i64(3) + k2),
            CSet::C2 => (k2.clone() - Q::one()) / (k2 + Q::from_i64(3)),
        }
    }

    /// Common line sum of the `3×3` block `𝒞̄`.
    pub fn block_line_sum(self) -> i64 {
        match self {
            CSet::C1 => -1,
            CSet::C2 => 1,
        }
    }

    fn half_sign<F: Field>(self) -> F {
        match self {
            CSet::C1 => F::ratio(1, 2),
            CSet::C2 => F::ratio(-1, 2),
        }
    }
}

impl FromStr for CSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "C1" | "c1" => Ok(CSet::C1),
            "C2" | "c2" => Ok(CSet::C2),
            other => Err(Error::Parse(format!("bad C-set name {other:?}"))),
        }
    }
}

fn check_c2<F: Field>(which: CSet, c2: &F) -> Result<()> {
    let (lo, hi) = which.interval();
    let v = c2.to_f64();
    let slack = if F::EXACT { 0.0 } else { 1e-12 };
    let inside = if F::EXACT {
        let d = which.discriminant(c2);
        !d.is_negative()
    } else {
        v >= lo.to_f64() - slack && v <= hi.to_f64() + slack
    };
    if inside {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("c2 = {c2} outside [{lo}, {hi}]")))
    }
}

/// Element of `𝒞₁` or `𝒞₂` with `a₄` taken from the printed formula.
pub fn c_set_element<F: Field>(which: CSet, c2: &F, branch: Sign) -> Result<Mat4<F>> {
    check_c2(which, c2)?;
    let a4 = match which.a4(c2, branch) {
        Some(a) => a,
        None if F::EXACT => {
            return Err(Error::Invalid(format!(
                "discriminant {} is not a rational square",
                which.discriminant(c2)
            )))
        }
        // Rounding can push the discriminant just below zero at the endpoints.
        None => -(c2.clone() * F::ratio(1, 2)),
    };
    Ok(c_set_matrix(which, &a4, c2))
}

/// The displayed `𝒞` matrix for explicit `(a₄, c₂)`.
pub fn c_set_matrix<F: Field>(which: CSet, a4: &F, c2: &F) -> Mat4<F> {
    let h: F = which.half_sign();
    let d = -a4.clone() - c2.clone();
    let e = h.clone() + c2.clone();
    let a = a4.clone();
    Mat::from_rows([
        [-h.clone(), h.clone(), h.clone(), h.clone()],
        [h.clone(), d.clone(), e.clone(), a.clone()],
        [h.clone(), a.clone(), d.clone(), e.clone()],
        [h, e, a, d],
    ])
}

/// `3×3` circulant with first row `(p, q, r)` shifted right.
pub fn circulant<F: Field>(p: &F, q: &F, r: &F) -> Mat3<F> {
    Mat::from_rows([
        [p.clone(), q.clone(), r.clone()],
        [r.clone(), p.clone(), q.clone()],
        [q.clone(), r.clone(), p.clone()],
    ])
}

/// The `𝒞̄` block for `(a₄, c₂)`.
pub fn c_bar_matrix<F: Field>(which: CSet, a4: &F, c2: &F) -> Mat3<F> {
    let s = F::from_i64(which.block_line_sum()) * F::ratio(1, 2);
    circulant(&(s.clone() - a4.clone() - c2.clone()), &(s + a4.clone()), c2)
}

/// Recover `(a₄, c₂)` if `b` lies in `𝒞̄_which`.
pub fn c_bar_membership<F: Field>(which: CSet, b: &Mat3<F>) -> Option<(F, F)> {
    let tol = b.tol();
    let c2 = b[(0, 2)].clone();
    let s = F::from_i64(which.block_line_sum()) * F::ratio(1, 2);
    let a4 = b[(0, 1)].clone() - s;
    if !c_bar_matrix(which, &a4, &c2).with_tol(tol).near(b) {
        return None;
    }
    // a₄ = −c₂/2 ± ½√disc  ⇔  (2a₄ + c₂)² = disc
    let lhs = (F::from_i64(2) * a4.clone() + c2.clone()).square();
    if !(lhs - which.discriminant(&c2)).near_zero(tol.max(if F::EXACT { 0.0 } else { 1e-10 })) {
        return None;
    }
    let (lo, hi) = which.interval();
    let v = c2.to_f64();
    let slack = if F::EXACT { 0.0 } else { 1e-10 };
    (v >= lo.to_f64() - slack && v <= hi.to_f64() + slack).then_some((a4, c2))
}

/// The order-3 OPM sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Opm3Set {
    XBar1,
    YBarM1,
    ZBar1,
    WBarM1,
}

impl Opm3Set {
    pub const ALL: [Opm3Set; 4] = [Opm3Set::XBar1, Opm3Set::YBarM1, Opm3Set::ZBar1, Opm3Set::WBarM1];

    pub fn line_sum(self) -> i64 {
        match self {
            Opm3Set::XBar1 | Opm3Set::ZBar1 => 1,
            Opm3Set::YBarM1 | Opm3Set::WBarM1 => -1,
        }
    }

    fn swapped_rows(self) -> bool {
        matches!(self, Opm3Set::ZBar1 | Opm3Set::WBarM1)
    }

    /// `x² + y² − x − y + xy` (line sum 1) or `x² + y² + x + y + xy` (line sum −1).
    pub fn constraint_residual<F: Field>(self, x: &F, y: &F) -> F {
        let quad = x.square() + y.square() + x.clone() * y.clone();
        let lin = x.clone() + y.clone();
        if self.line_sum() == 1 {
            quad - lin
        } else {
            quad + lin
        }
    }
}

impl fmt::Display for Opm3Set {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Opm3Set::XBar1 => "Xbar1",
            Opm3Set::YBarM1 => "Ybar-1",
            Opm3Set::ZBar1 => "Zbar1",
            Opm3Set::WBarM1 => "Wbar-1",
        })
    }
}

fn opm3_matrix<F: Field>(which: Opm3Set, x: &F, y: &F) -> Mat3<F> {
    let r = F::from_i64(which.line_sum()) - x.clone() - y.clone();
    let m = circulant(x, y, &r);
    if which.swapped_rows() {
        m.permute_rows(&Perm3::parse_cycles("(23)").expect("literal"))
    } else {
        m
    }
}

/// Order-3 OPM from the set `which` at `(x, y)`.
pub fn opm3_element<F: Field>(which: Opm3Set, x: &F, y: &F, tol: f64) -> Result<Mat3<F>> {
    let res = which.constraint_residual(x, y);
    if !res.near_zero(if F::EXACT { 0.0 } else { tol }) {
        return Err(Error::Constraint { residual: res.to_string() });
    }
    Ok(opm3_matrix(which, x, y))
}

/// Rational point `x = (1+k)/(1+k+k²)`, `y = kx` on the line-sum-1 conic;
/// negated for line sum −1.
pub fn opm3_rational_point(which: Opm3Set, k: &Q) -> (Q, Q) {
    let x = (Q::one() + k.clone()) / (Q::one() + k.clone() + k.square());
    let y = k.clone() * x.clone();
    if which.line_sum() == 1 {
        (x, y)
    } else {
        (-x, -y)
    }
}

/// Every order-3 set containing `b`, with recovered `(x, y)`.
pub fn opm3_membership<F: Field>(b: &Mat3<F>) -> Vec<(Opm3Set, F, F)> {
    let tol = b.tol();
    let mut out = Vec::new();
    for which in Opm3Set::ALL {
        let x = b[(0, 0)].clone();
        let y = b[(0, 1)].clone();
        let rebuilt = opm3_matrix(which, &x, &y).with_tol(tol);
        if rebuilt.near(b) && which.constraint_residual(&x, &y).near_zero(tol.max(if F::EXACT { 0.0 } else { 1e-10 })) {
            out.push((which, x, y));
        }
    }
    out
}

/// Witness that a matrix is `P̄·C·M·C` for a family member.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyWitness<F> {
    pub fid: FamilyId,
    pub pbar: Perm4,
    pub point: ParamPoint<F>,
}

/// Witness that a matrix is an OPM.
#[derive(Clone, Debug, PartialEq)]
pub enum OpmWitness<F> {
    Family(FamilyWitness<F>),
    Sporadic { tau: Perm4, sign: Sign, kind: SporadicKind },
}

fn predicate_tol<F: Field>(a: &Mat4<F>) -> f64 {
    if F::EXACT {
        0.0
    } else {
        a.tol()
    }
}

/// The point at which `a = P̄·C·M·C` for the given set and prefix, if any.
pub fn family_member<F: Field>(a: &Mat4<F>, fid: FamilyId, pbar: &Perm4) -> Option<ParamPoint<F>> {
    let c = fid.letter.conjugator();
    let b = a.permute_rows(&pbar.inverse()).permuted(&c, &c);
    member_of_kind(&b, fid.kind(), predicate_tol(a), a.tol())
}

fn member_of_kind<F: Field>(b: &Mat4<F>, kind: Kind, tol: f64, mat_tol: f64) -> Option<ParamPoint<F>> {
    let p = ParamPoint { x: b[(0, 0)].clone(), z: b[(0, 2)].clone() };
    if !constraint_residual(kind, &p).near_zero(tol) {
        return None;
    }
    mn_matrix(kind, &p.x, &p.z).with_tol(mat_tol).near(b).then_some(p)
}

/// All family witnesses for `a`, in the order (prefix, letter, index).
pub fn family_memberships<F: Field>(a: &Mat4<F>) -> Vec<FamilyWitness<F>> {
    let tol = predicate_tol(a);
    let mut out = Vec::new();
    for pbar in Perm4::fixing_one() {
        let stripped = a.permute_rows(&pbar.inverse());
        for letter in Letter::ALL {
            let c = letter.conjugator();
            let b = stripped.permuted(&c, &c);
            for kind in Kind::ALL {
                if let Some(point) = member_of_kind(&b, kind, tol, a.tol()) {
                    out.push(FamilyWitness { fid: FamilyId { letter, j: kind.index() }, pbar, point });
                }
            }
        }
    }
    out
}

/// First family witness, then a sporadic form, or `None`.
pub fn opm_witness<F: Field>(a: &Mat4<F>) -> Option<OpmWitness<F>> {
    if let Some(w) = family_memberships(a).into_iter().next() {
        return Some(OpmWitness::Family(w));
    }
    sporadic_membership(a)
}

pub fn sporadic_membership<F: Field>(a: &Mat4<F>) -> Option<OpmWitness<F>> {
    for kind in [SporadicKind::Plain, SporadicKind::HalfJ] {
        for tau in Perm4::all() {
            for sign in [Sign::Plus, Sign::Minus] {
                if sporadic_opm::<F>(&tau, sign, kind).with_tol(a.tol()).near(a) {
                    return Some(OpmWitness::Sporadic { tau, sign, kind });
                }
            }
        }
    }
    None
}

/// Rebuild the matrix a witness describes.
pub fn witness_matrix<F: Field>(w: &OpmWitness<F>) -> Mat4<F> {
    match w {
        OpmWitness::Family(f) => {
            let c = f.fid.letter.conjugator();
            mn_matrix(f.fid.kind(), &f.point.x, &f.point.z).permuted(&c, &c).permute_rows(&f.pbar)
        }
        OpmWitness::Sporadic { tau, sign, kind } => sporadic_opm(tau, *sign, *kind),
    }
}
