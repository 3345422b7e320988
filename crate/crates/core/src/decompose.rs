//! The span `𝖫` of the 4×4 permutation matrices and decompositions in it.

use std::collections::BTreeMap;
use std::fmt;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyWitness, OpmWitness, SporadicKind};
use crate::linalg;
use crate::mat::{Mat, Mat4};
use crate::perm::{class_of, p4, Perm4, PermClass};
use crate::scalar::{Field, Q};

/// Finite linear combination `Σ c_σ P_σ` with no zero coefficients.
#[derive(Clone, PartialEq)]
pub struct PermLinComb<F> {
    terms: BTreeMap<Perm4, F>,
}

impl<F: Field> Default for PermLinComb<F> {
    fn default() -> Self {
        PermLinComb { terms: BTreeMap::new() }
    }
}

impl<F: Field> PermLinComb<F> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sum of the given terms; repeated permutations accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (Perm4, F)>) -> Self {
        let mut c = Self::new();
        for (p, v) in terms {
            c.add_term(p, v);
        }
        c
    }

    pub fn add_term(&mut self, p: Perm4, v: F) {
        let sum = match self.terms.remove(&p) {
            Some(old) => old + v,
            None => v,
        };
        if !sum.near_zero(0.0) {
            self.terms.insert(p, sum);
        }
    }

    pub fn coeff(&self, p: &Perm4) -> F {
        self.terms.get(p).cloned().unwrap_or_else(F::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Perm4, &F)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<Perm4> {
        self.terms.keys().copied().collect()
    }

    pub fn coefficient_sum(&self) -> F {
        self.terms.values().cloned().fold(F::zero(), |a, b| a + b)
    }

    /// `Σ c_σ P_σ`.
    pub fn evaluate(&self) -> Mat4<F> {
        let mut m = Mat4::<F>::zero();
        for (p, c) in &self.terms {
            for i in 0..4 {
                let j = p.apply(i);
                m[(i, j)] = m[(i, j)].clone() + c.clone();
            }
        }
        m
    }

    /// Drop coefficients within `tol` of zero.
    pub fn pruned(&self, tol: f64) -> Self {
        PermLinComb {
            terms: self.terms.iter().filter(|(_, c)| !c.near_zero(tol)).map(|(p, c)| (*p, c.clone())).collect(),
        }
    }
}

impl<F: Field> fmt::Debug for PermLinComb<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{c}·P{p}")).collect();
        write!(f, "{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

/// A subset of `{1,…,5}`, naming the direct sum `⊕ 𝖫_k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subspaces(u8);

impl Subspaces {
    pub fn empty() -> Self {
        Subspaces(0)
    }

    pub fn of(ks: &[u8]) -> Self {
        let mut s = Subspaces(0);
        for &k in ks {
            s.insert(k);
        }
        s
    }

    pub fn insert(&mut self, k: u8) {
        assert!((1..=5).contains(&k), "subspace index {k} not in 1..5");
        self.0 |= 1 << k;
    }

    pub fn contains(self, k: u8) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn is_subset(self, other: Subspaces) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn members(self) -> Vec<u8> {
        (1..=5).filter(|&k| self.contains(k)).collect()
    }

    /// All 31 nonempty subsets.
    pub fn all_nonempty() -> Vec<Subspaces> {
        (1u8..32).map(|m| Subspaces(m << 1)).collect()
    }
}

impl fmt::Display for Subspaces {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

impl fmt::Debug for Subspaces {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{self}")
    }
}

impl Serialize for Subspaces {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspaces {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        if v.iter().any(|k| !(1..=5).contains(k)) {
            return Err(serde::de::Error::custom("subspace index not in 1..5"));
        }
        Ok(Subspaces::of(&v))
    }
}

/// The basis `ℬ = ℬ₁ ∪ … ∪ ℬ₅` in block order.
pub fn basis_b() -> [Perm4; 10] {
    [
        p4("(12)"),
        p4("(34)"),
        p4("(13)(24)"),
        p4("(14)(23)"),
        p4("(24)"),
        p4("(12)(34)"),
        p4("(124)"),
        p4("(234)"),
        p4("(123)"),
        p4("(23)"),
    ]
}

/// Block index `k` of each element of [`basis_b`].
pub const BASIS_BLOCK: [u8; 10] = [1, 1, 1, 1, 2, 2, 3, 3, 4, 5];

/// Elements of `ℬ_k`.
pub fn basis_block(k: u8) -> Vec<Perm4> {
    basis_b().iter().zip(BASIS_BLOCK).filter(|(_, b)| *b == k).map(|(p, _)| *p).collect()
}

/// Ten entry positions on which `ℬ` is independent, with the inverse of the
/// `10×10` restriction.
struct SpanSolver {
    positions: Vec<(usize, usize)>,
    inverse: linalg::Dense<Q>,
}

static SOLVER: Lazy<SpanSolver> = Lazy::new(|| {
    let basis = basis_b();
    let vecs: linalg::Dense<Q> = basis
        .iter()
        .map(|p| p.to_matrix::<Q>().to_vec16().to_vec())
        .collect();
    let mut work = vecs.clone();
    let pivots = linalg::rref(&mut work, 0.0);
    assert_eq!(pivots.len(), 10, "basis is not independent");
    let positions: Vec<(usize, usize)> = pivots.iter().map(|&k| (k / 4, k % 4)).collect();
    let restricted: linalg::Dense<Q> =
        pivots.iter().map(|&k| vecs.iter().map(|v| v[k].clone()).collect()).collect();
    let inverse = linalg::inverse(&restricted, 0.0).expect("restriction is invertible");
    SpanSolver { positions, inverse }
});

/// Coordinates of `a` in `ℬ`, if `a ∈ 𝖫`.
///
/// The coordinates are read off ten independent entries and the remaining
/// six are checked against the reconstruction (exactly, or within the
/// matrix tolerance).
pub fn in_perm_span<F: Field>(a: &Mat4<F>) -> Option<PermLinComb<F>> {
    let s = &*SOLVER;
    let rhs: Vec<F> = s.positions.iter().map(|&(i, j)| a[(i, j)].clone()).collect();
    let inv: linalg::Dense<F> = s.inverse.iter().map(|r| r.iter().map(F::from_q).collect()).collect();
    let coords = linalg::mat_vec(&inv, &rhs);
    let tol = if F::EXACT { 0.0 } else { a.tol() };
    let comb = PermLinComb::from_terms(basis_b().into_iter().zip(coords)).pruned(tol);
    comb.evaluate().with_tol(a.tol()).near(a).then_some(comb)
}

/// Smallest set of `k` with `a ∈ ⊕ 𝖫_k`.
pub fn subspace_membership<F: Field>(a: &Mat4<F>) -> Result<Subspaces> {
    let c = in_perm_span(a).ok_or(Error::NotInSpan)?;
    Ok(membership_of(&c))
}

/// Blocks of `ℬ` carrying a nonzero coordinate of `c`.
pub fn membership_of<F: Field>(c: &PermLinComb<F>) -> Subspaces {
    let basis = basis_b();
    let mut s = Subspaces::empty();
    for (p, _) in c.terms() {
        if let Some(idx) = basis.iter().position(|b| b == p) {
            s.insert(BASIS_BLOCK[idx]);
        }
    }
    s
}

/// Express `P̄ᵀa` on the letter's H-orthogonal quadruple; returns the
/// combination of `a` itself (so `evaluate` gives back `a`) together with
/// the coefficients `(x, y, z, w)`.
pub fn opm_as_four_perms<F: Field>(a: &Mat4<F>, witness: &OpmWitness<F>) -> Result<FourPerms<F>> {
    let tol = if F::EXACT { 0.0 } else { a.tol() };
    match witness {
        OpmWitness::Family(FamilyWitness { fid, pbar, .. }) => {
            let quad = fid.letter.quadruple();
            let stripped = a.permute_rows(&pbar.inverse());
            let coeffs: [F; 4] = std::array::from_fn(|k| stripped[(0, quad[k].apply(0))].clone());
            let comb = PermLinComb::from_terms(quad.iter().copied().zip(coeffs.iter().cloned())).pruned(tol);
            if !comb.evaluate().with_tol(a.tol()).near(&stripped) {
                return Err(Error::Invalid(format!("witness {fid} does not reproduce the matrix")));
            }
            let whole = PermLinComb::from_terms(quad.iter().map(|q| pbar.compose(q)).zip(coeffs.iter().cloned())).pruned(tol);
            Ok(FourPerms { pbar: *pbar, quadruple: quad, coeffs, combination: whole })
        }
        OpmWitness::Sporadic { tau, sign, kind } => {
            let s = sign.value::<F>();
            let comb = match kind {
                SporadicKind::Plain => PermLinComb::from_terms([(*tau, s)]),
                SporadicKind::HalfJ => {
                    let mut c = PermLinComb::from_terms([(*tau, -s.clone())]);
                    let half = s * F::ratio(1, 2);
                    for q in p4_klein() {
                        c.add_term(q, half.clone());
                    }
                    c
                }
            };
            if !comb.evaluate().with_tol(a.tol()).near(a) {
                return Err(Error::Invalid("sporadic witness does not reproduce the matrix".into()));
            }
            let pbar = Perm4::identity();
            let quad = [Perm4::identity(); 4];
            Ok(FourPerms { pbar, quadruple: quad, coeffs: std::array::from_fn(|_| F::zero()), combination: comb })
        }
    }
}

/// `J₄ = Σ P_σ` over the Klein four-group.
fn p4_klein() -> [Perm4; 4] {
    [Perm4::identity(), p4("(12)(34)"), p4("(13)(24)"), p4("(14)(23)")]
}

/// Result of [`opm_as_four_perms`].
#[derive(Clone, Debug, PartialEq)]
pub struct FourPerms<F: Field> {
    pub pbar: Perm4,
    pub quadruple: [Perm4; 4],
    /// `(x, y, z, w)` on `quadruple` for `P̄ᵀa`; zeros for sporadic witnesses.
    pub coeffs: [F; 4],
    /// `a` as a combination of at most four (family) or five (sporadic) permutations.
    pub combination: PermLinComb<F>,
}

/// Group the terms of `c` by the class of the six-class partition of `S₄`;
/// returns each nonempty class with its partial sum.
pub fn split_six_permutative<F: Field>(c: &PermLinComb<F>) -> Vec<(PermClass, Mat4<F>)> {
    let mut groups: BTreeMap<usize, (PermClass, PermLinComb<F>)> = BTreeMap::new();
    for (p, v) in c.terms() {
        let cls = class_of(p);
        groups
            .entry(cls.index)
            .or_insert_with(|| (cls, PermLinComb::new()))
            .1
            .add_term(*p, v.clone());
    }
    groups.into_values().map(|(cls, comb)| (cls, comb.evaluate())).collect()
}

/// Outcome of [`add_perm_preserves_opm`].
#[derive(Clone, Debug, PartialEq)]
pub enum AddPermOutcome<F: Field> {
    /// `a + cP` is orthogonal; `permutative` records the check on it.
    Orthogonal { matrix: Mat4<F>, permutative: bool },
    /// Not orthogonal; permutativity was not tested.
    NotOrthogonal { matrix: Mat4<F> },
}

/// `a + cP` for `a` in the span of a pairwise H-orthogonal set.
pub fn add_perm_preserves_opm<F: Field>(a: &PermLinComb<F>, c: &F, p: &Perm4) -> Result<AddPermOutcome<F>> {
    let support = a.support();
    for (i, s) in support.iter().enumerate() {
        for t in &support[i + 1..] {
            if !s.h_orthogonal(t) {
                return Err(Error::Invalid(format!("{s} and {t} are not H-orthogonal")));
            }
        }
    }
    let m = a.evaluate() + p.to_matrix::<F>().scale(c);
    Ok(if m.is_orthogonal() {
        let permutative = m.is_permutative();
        AddPermOutcome::Orthogonal { matrix: m, permutative }
    } else {
        AddPermOutcome::NotOrthogonal { matrix: m }
    })
}

/// `[m11, …, m44]` as a `Mat4`, for tests and fixtures.
pub fn from_row_major<F: Field>(v: [F; 16]) -> Mat4<F> {
    Mat::from_fn(|i, j| v[4 * i + j].clone())
}
