//! Executable checks of the published claims, collected into a report.
//!
//! Each entry quotes the statement it checks verbatim, records how it was
//! checked, and carries up to a handful of counterexamples when it fails.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blocks::{direct_sum_catalog, find_direct_sum_form, hadamard_block_search, signed_permutation, Summands};
use crate::classify::{classify_orthogonal, Classification, GateRule, Tag};
use crate::decompose::{
    add_perm_preserves_opm, in_perm_span, membership_of, opm_as_four_perms, split_six_permutative, AddPermOutcome,
    PermLinComb, Subspaces,
};
use crate::error::{Error, Result};
use crate::families::{
    c_set_element, family_element, family_member, grover, opm_witness, rational_point_for, CSet, FamilyId,
    FamilyWitness, Letter, Opm3Set, OpmWitness, ParamPoint, TrigFamily,
};
use crate::mat::{qmat, Mat, Mat4};
use crate::patterns::{pattern_of, Pattern4};
use crate::perm::{p4, s4_partition, Perm4};
use crate::sampling::{covered_samples, random_family_element, random_orthogonal, random_perm, random_rational, random_sign, Source};
use crate::scalar::{Field, Scalar, Q};
use crate::scans::{three_perm_scan, two_perm_orthogonality_scan};

pub const DEFAULT_SAMPLES: usize = 200;
const MAX_WITNESSES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactExhaustive,
    ExactSampled,
    ApproxSampled,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactExhaustive => "exact-exhaustive",
            Method::ExactSampled => "exact-sampled",
            Method::ApproxSampled => "approx-sampled",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub claim: String,
    /// The checked statement, quoted.
    pub anchor: String,
    pub method: Method,
    pub samples: usize,
    pub passed: bool,
    pub detail: String,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub samples: usize,
    pub entries: Vec<ReportEntry>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per entry, then the witnesses of failed entries.
    pub fn table(&self) -> String {
        let width = self.entries.iter().map(|e| e.claim.len()).max().unwrap_or(5).max(5);
        let mut out = format!("{:<4}  {:<width$}  {:<16}  {:>7}  detail\n", "ok", "claim", "method", "samples");
        for e in &self.entries {
            let mark = if e.passed { "PASS" } else { "FAIL" };
            out += &format!("{mark:<4}  {:<width$}  {:<16}  {:>7}  {}\n", e.claim, e.method.name(), e.samples, e.detail);
        }
        for e in self.failures() {
            out += &format!("\n{}: {}\n", e.claim, e.anchor);
            for w in &e.witnesses {
                out += &format!("  {w}\n");
            }
        }
        out
    }
}

/// Pass/fail counter that keeps the first few counterexamples.
#[derive(Default)]
struct Tally {
    checks: usize,
    failed: usize,
    witnesses: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    fn finish(self, claim: &str, anchor: &str, method: Method, samples: usize, note: &str) -> ReportEntry {
        let mut detail = format!("{} checks, {} failed", self.checks, self.failed);
        if !note.is_empty() {
            detail = format!("{detail}; {note}");
        }
        ReportEntry {
            claim: claim.into(),
            anchor: anchor.into(),
            method,
            samples,
            passed: self.failed == 0 && self.checks > 0,
            detail,
            witnesses: self.witnesses,
        }
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

const ANCHOR_CHAIN: &str = "The following are chains of groups of complex orthogonal matrices.";
const ANCHOR_CHAIN_TABLE: &str = "$AB \\in P_{(34)}{\\mathcal X}_3~$ if $A,B\\in {\\mathcal X}_j$ and $AB\\in P_{(34)}{\\mathcal X}_j$ if either $A$ or $B\\in {\\mathcal X}_j$";
const ANCHOR_NONCLOSURE: &str = "${\\mathcal O}{\\mathcal P}_4$ is not closed under matrix multiplication";
const ANCHOR_COMMUTATIVE: &str = "can be written as $A=x I +y P+z P^2 +w P^3,$";
const ANCHOR_GROVER: &str = "where $x=-\\frac{1}{2}, y=\\frac{1}{2}= z=w.$";
const ANCHOR_RATIONAL: &str =
    "$x=\\dfrac{r^2-1}{2(r^2+1)},z=\\dfrac{1}{2}\\pm \\dfrac{r}{r^2+1}$ for $s=+$ and $x=\\dfrac{r^2-1}{2(r^2+1)},z=-\\dfrac{1}{2}\\pm \\dfrac{r}{r^2+1},$ for $s=-$";
const ANCHOR_DET: &str = "Then $\\det(A)=1$ if $A\\in {\\mathcal X}_j \\cup {\\mathcal Y}_j\\cup {\\mathcal Z}_j, j=1, 2$";
const ANCHOR_TRIG: &str = "provides one-parameter trigonometric parametrizations for the parametric curves";
const ANCHOR_FOUR_PERMS: &str = "Any OPM $A$ of order $4$ can be written as linear combination of permutation matrices as follows:";
const ANCHOR_LINE_SUM: &str = "the sum of the entries of $A$ along each row and column is $\\pm 1.$";
const ANCHOR_PARTITION: &str = "is a pairwise $H$-orthogonal set and any $A\\in \\langle M_{\\tilde{S}_k} \\rangle$ is a permutative matrix";
const ANCHOR_SIX_SPLIT: &str = "Any linear combination of permutation matrices of order $4$ can be written as a  sum of at most $6$ permutative matrices";
const ANCHOR_ADD_PERM: &str = "Then $A+c P$  is an OPM for any $c\\in {\\mathbb R}$ and $P\\in {\\mathcal P}_4.$";
const ANCHOR_TWO_PERMS: &str =
    "There is no orthogonal matrix which is a non-trivial linear combination of two distinct permutation matrices.";
const ANCHOR_THREE_PERMS: &str = "either $\\pm A$ is a permutation matrix or $XAY$ is a direct sum of OPMs of order $3$ and $1$";
const ANCHOR_SUPPORT: &str = "A $(0,1)$ matrix of degree $n \\leq 4 $ supports a unitary if and only if it is strongly quadrangular.";
const ANCHOR_C_SETS: &str = "Then observe that $HMH=\\bmatrix{1 & 0\\\\ 0 & M_1}$ if $M\\in \\mathcal{C}_1$ for some matrix $M_1\\in \\mathcal{\\overline{C}}_1,$";
const ANCHOR_CATALOG: &str = "Then $PAQ = \\bmatrix{1&0\\\\0&B}$ for $B\\in \\overline{{\\mathcal X}}_1\\cup \\overline{{\\mathcal Z}}_1,$ or $PAQ = \\bmatrix{-1&0\\\\0&C}$";
const ANCHOR_CONCLUSION: &str = "It can be verified that $M$ does not have any of the combinatorial structure as mentioned above.";

fn gate_anchor(rule: GateRule) -> &'static str {
    match rule {
        GateRule::Single | GateRule::Pair => {
            "Let $A \\in {\\mathsf L}_i \\oplus {\\mathsf L}_j,$ $i,j\\in\\{1,\\ldots,5\\}$ be an orthogonal matrix.   Then $A \\in {\\mathcal O}{\\mathcal P}_4.$"
        }
        GateRule::L1WithPair => {
            "Let $A \\in {\\mathsf L}_1\\oplus {\\mathsf L}_i \\oplus {\\mathsf L}_j$ be orthogonal where $i,j\\in\\{2,3,4,5\\}$ and $(i,j)\\notin \\{(2,5),(3,4)\\}.$ Then $A\\in{\\mathcal O}{\\mathcal P}_4.$"
        }
        GateRule::L1L3L4 => {
            "Let $A \\in {\\mathsf L}_1 \\oplus {\\mathsf L}_3 \\oplus {\\mathsf L}_4$ be orthogonal. Then either $A\\in {\\mathcal O}{\\mathcal P}_4$ or there exist $P,Q\\in {\\mathcal P}_4$ such that $PAQ$ or $H(PAQ)H$ is of the form"
        }
        GateRule::TripleWithoutL1 => {
            "Let $A \\in {\\mathsf L}_i\\oplus {\\mathsf L}_j\\oplus{\\mathsf L}_k$ be orthogonal where $i,j,k\\in\\{2,3,4,5\\},$ then $A\\in{\\mathcal O}{\\mathcal P}_4.$"
        }
        GateRule::L2L3L4L5 => {
            "Let $A \\in {\\mathsf L}_2\\oplus{\\mathsf L}_3\\oplus{\\mathsf L}_4 \\oplus {\\mathsf L}_5$ be orthogonal. Then $A \\in {\\mathcal O}{\\mathcal P}_4.$"
        }
    }
}

fn gate_claim(rule: GateRule) -> &'static str {
    match rule {
        GateRule::Single => "gate-single",
        GateRule::Pair => "gate-pair",
        GateRule::L1WithPair => "gate-l1-with-pair",
        GateRule::L1L3L4 => "gate-l1-l3-l4",
        GateRule::TripleWithoutL1 => "gate-triple-without-l1",
        GateRule::L2L3L4L5 => "gate-l2-l3-l4-l5",
    }
}

/// The three chains, one per letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Chain {
    X,
    Y,
    Z,
}

impl Chain {
    pub const ALL: [Chain; 3] = [Chain::X, Chain::Y, Chain::Z];

    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Chain::X),
            2 => Ok(Chain::Y),
            3 => Ok(Chain::Z),
            _ => Err(Error::OutOfRange(format!("unknown chain {k}; expected 1, 2 or 3"))),
        }
    }

    pub fn letter(self) -> Letter {
        match self {
            Chain::X => Letter::X,
            Chain::Y => Letter::Y,
            Chain::Z => Letter::Z,
        }
    }

    fn index(self) -> u64 {
        match self {
            Chain::X => 1,
            Chain::Y => 2,
            Chain::Z => 3,
        }
    }
}

impl FromStr for Chain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(Chain::X),
            "Y" | "y" => Ok(Chain::Y),
            "Z" | "z" => Ok(Chain::Z),
            other => match other.parse::<u8>() {
                Ok(k) => Chain::from_index(k),
                Err(_) => Err(Error::Parse(format!("unknown chain {other:?}"))),
            },
        }
    }
}

/// `P·𝒳ⱼ` (prefixed) or `𝒳ⱼ` for one letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ChainSet {
    prefixed: bool,
    j: u8,
}

impl ChainSet {
    fn all() -> Vec<ChainSet> {
        [true, false].iter().flat_map(|&prefixed| (1..=4).map(move |j| ChainSet { prefixed, j })).collect()
    }

    fn pbar(self, letter: Letter) -> Perm4 {
        if self.prefixed {
            letter.chain_prefix()
        } else {
            Perm4::identity()
        }
    }

    fn name(self, letter: Letter) -> String {
        if self.prefixed {
            format!("P{}{}{}", letter.chain_prefix(), letter, self.j)
        } else {
            format!("{}{}", letter, self.j)
        }
    }

    /// Indices behave like the group `{±1, ±ε}` with `ε² = 1`:
    /// `3 ↦ 1`, `4 ↦ −1`, `1 ↦ ε`, `2 ↦ −ε`.
    fn label(self) -> (bool, bool) {
        match self.j {
            3 => (false, false),
            4 => (true, false),
            1 => (false, true),
            _ => (true, true),
        }
    }

    fn product(self, other: ChainSet) -> ChainSet {
        let (na, ea) = self.label();
        let (nb, eb) = other.label();
        let j = match (na ^ nb, ea ^ eb) {
            (false, false) => 3,
            (true, false) => 4,
            (false, true) => 1,
            (true, true) => 2,
        };
        ChainSet { prefixed: self.prefixed == other.prefixed, j }
    }
}

fn chain_sample(rng: &mut ChaCha8Rng, letter: Letter, set: ChainSet) -> Mat4<Q> {
    let fid = FamilyId { letter, j: set.j };
    let p = rational_point_for(fid, &random_rational(rng), random_sign(rng)).expect("nonzero parameter");
    family_element(fid, &p, &set.pbar(letter), 0.0).expect("rational points lie on the conic")
}

fn in_chain_set(a: &Mat4<Q>, letter: Letter, set: ChainSet) -> bool {
    family_member(a, FamilyId { letter, j: set.j }, &set.pbar(letter)).is_some()
}

/// Products, transposes and the identity within the chain of one letter,
/// with `n_samples` exact pairs for each of the 64 ordered pairs of sets.
pub fn verify_group_chain(chain: Chain, n_samples: usize, seed: u64) -> Result<ReportEntry> {
    if n_samples == 0 {
        return Err(Error::OutOfRange("n_samples must be at least 1".into()));
    }
    let letter = chain.letter();
    let mut rng = rng_for(seed, 0x100 + chain.index());
    let sets = ChainSet::all();
    let pools: Vec<Vec<Mat4<Q>>> =
        sets.iter().map(|&s| (0..n_samples).map(|_| chain_sample(&mut rng, letter, s)).collect()).collect();
    let mut t = Tally::default();
    let unit = ChainSet { prefixed: true, j: 3 };
    t.check(in_chain_set(&Mat4::identity(), letter, unit), || format!("I not in {}", unit.name(letter)));
    for (s, pool) in sets.iter().zip(&pools) {
        for a in pool {
            let at = a.transpose();
            t.check(in_chain_set(&at, letter, *s) && a.matmul(&at) == Mat4::identity(), || {
                format!("transpose of A in {} leaves the set: A = {a:?}", s.name(letter))
            });
        }
    }
    for (sa, pa) in sets.iter().zip(&pools) {
        for (sb, pb) in sets.iter().zip(&pools) {
            let target = sa.product(*sb);
            for k in 0..n_samples {
                let (a, b) = (&pa[k], &pb[(k + 1) % n_samples]);
                let ab = a.matmul(b);
                t.check(in_chain_set(&ab, letter, target), || {
                    format!(
                        "A in {}, B in {}, AB not in {}: A = {a:?}, B = {b:?}",
                        sa.name(letter),
                        sb.name(letter),
                        target.name(letter)
                    )
                });
            }
        }
    }
    let claim = format!("group-chain-{letter}");
    let anchor = format!("{ANCHOR_CHAIN} {ANCHOR_CHAIN_TABLE}");
    Ok(t.finish(&claim, &anchor, Method::ExactSampled, n_samples, "64 ordered pairs of sets, transposes, identity"))
}

/// `A ∈ 𝒳₁` of the non-closure example.
pub fn nonclosure_a() -> Mat4<Q> {
    qmat([[2, -2, 4, 1], [-2, 2, 1, 4], [4, 1, -2, 2], [1, 4, 2, -2]], 5)
}

/// `B ∈ 𝒴₁` of the non-closure example.
pub fn nonclosure_b() -> Mat4<f64> {
    let s = 2f64.sqrt() / 3.0;
    let (a, b) = (2.0 / 3.0, 1.0 / 3.0);
    Mat::from_rows([[s, a, -s, b], [a, -s, b, s], [-s, b, s, a], [b, s, a, -s]])
}

/// The product `AB` as printed.
pub fn nonclosure_printed_product() -> Mat4<f64> {
    let r = 2f64.sqrt();
    Mat::from_rows([
        [-2.0 * r / 15.0 - 0.2, 8.0 / 15.0 + r / 5.0, 2.0 * r / 15.0, 2.0 / 3.0 - r / 5.0],
        [-r / 5.0 + 8.0 / 15.0, -0.2 + 2.0 * r / 15.0, r / 5.0 + 2.0 / 3.0, -2.0 * r / 15.0],
        [2.0 * r / 5.0 + 4.0 / 15.0, 0.4 + r / 15.0, -2.0 * r / 5.0 + 1.0 / 3.0, -r / 15.0],
        [-r / 15.0 + 0.4, 4.0 / 15.0 - 2.0 * r / 5.0, r / 15.0, 1.0 / 3.0 + 2.0 * r / 5.0],
    ])
}

/// Largest gap between the sorted rows and the sorted first row.
pub fn row_multiset_spread(a: &Mat4<f64>) -> f64 {
    let sorted = |i: usize| {
        let mut r = *a.row(i);
        r.sort_by(f64::total_cmp);
        r
    };
    let first = sorted(0);
    (1..4)
        .map(|i| sorted(i).iter().zip(&first).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

pub fn verify_nonclosure_example() -> ReportEntry {
    let mut t = Tally::default();
    let a = nonclosure_a();
    let b = nonclosure_b().with_tol(1e-10);
    let x1 = FamilyId { letter: Letter::X, j: 1 };
    let y1 = FamilyId { letter: Letter::Y, j: 1 };
    t.check(a.is_orthogonal() && a.is_permutative(), || format!("A is not an OPM: {a:?}"));
    t.check(family_member(&a, x1, &Perm4::identity()).is_some(), || "A is not in X1".into());
    t.check(b.is_orthogonal() && b.is_permutative(), || format!("B is not an OPM: {b:?}"));
    t.check(family_member(&b, y1, &Perm4::identity()).is_some(), || "B is not in Y1".into());
    let ab = a.to_f64().matmul(&b);
    let printed = nonclosure_printed_product();
    let gap = ab.max_abs_diff(&printed);
    t.check(gap < 1e-12, || format!("computed AB differs from the printed product by {gap:e}"));
    let residual = ab.orthogonality_residual();
    t.check(residual < 1e-12, || format!("AB orthogonality residual {residual:e}"));
    let spread = row_multiset_spread(&ab);
    t.check(spread > 1e-3 && !ab.clone().with_tol(1e-10).is_permutative(), || format!("AB rows agree as multisets: {ab:?}"));
    let note = format!("orthogonality residual {residual:.1e}, row multiset spread {spread:.4}");
    t.finish("nonclosure", ANCHOR_NONCLOSURE, Method::ApproxSampled, 1, &note)
}

/// `(x, y, z, w)` with `a = xI + yP + zP² + wP³`.
pub fn cyclic_coefficients<F: Field>(a: &Mat4<F>, generator: &Perm4) -> [F; 4] {
    std::array::from_fn(|k| a[(0, generator.pow(k).apply(0))].clone())
}

fn cyclic_rebuild<F: Field>(c: &[F; 4], generator: &Perm4) -> Mat4<F> {
    PermLinComb::from_terms((0..4).map(|k| (generator.pow(k), c[k].clone()))).evaluate()
}

pub fn verify_commutative_remark() -> ReportEntry {
    verify_commutative_remark_with(DEFAULT_SAMPLES, 0)
}

/// Cyclic expansions and commutativity on `n` exact samples per letter.
pub fn verify_commutative_remark_with(n: usize, seed: u64) -> ReportEntry {
    let mut rng = rng_for(seed, 0x200);
    let mut t = Tally::default();
    let set = ChainSet { prefixed: true, j: 3 };
    for letter in Letter::ALL {
        let g = letter.cyclic_generator();
        let id = Mat4::<Q>::identity();
        let c = cyclic_coefficients(&id, &g);
        t.check(c == [Q::one(), Q::zero(), Q::zero(), Q::zero()], || format!("I on powers of {g}: {c:?}"));
        let fixture = family_element(
            FamilyId { letter, j: 3 },
            &ParamPoint::new(Q::one(), Q::zero()),
            &letter.chain_prefix(),
            0.0,
        )
        .expect("(1, 0) lies on the conic");
        let mut previous: Option<Mat4<Q>> = Some(fixture);
        for _ in 0..n {
            let a = chain_sample(&mut rng, letter, set);
            let c = cyclic_coefficients(&a, &g);
            t.check(cyclic_rebuild(&c, &g) == a, || format!("{} element not cyclic in {g}: {a:?}", set.name(letter)));
            if let Some(b) = &previous {
                t.check(a.matmul(b) == b.matmul(&a), || format!("{a:?} and {b:?} do not commute"));
            }
            previous = Some(a);
        }
        if let Some(b) = previous {
            let c = cyclic_coefficients(&b, &g);
            t.check(cyclic_rebuild(&c, &g) == b, || format!("fixture not cyclic in {g}"));
        }
    }
    let method = if n == 0 { Method::ExactExhaustive } else { Method::ExactSampled };
    t.finish("commutative-subgroups", ANCHOR_COMMUTATIVE, method, n, "")
}

fn verify_grover() -> ReportEntry {
    let mut t = Tally::default();
    let g = grover::<Q>();
    let printed = qmat([[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]], 2);
    t.check(g == printed, || format!("{g:?}"));
    let w = opm_witness(&g);
    let ok = matches!(&w, Some(OpmWitness::Family(FamilyWitness { fid, pbar, .. }))
        if *fid == FamilyId { letter: Letter::X, j: 1 } && *pbar == p4("(34)"));
    t.check(ok, || format!("witness {w:?}"));
    if let Some(w) = &w {
        match opm_as_four_perms(&g, w) {
            Ok(fp) => {
                let want = [Q::ratio(-1, 2), Q::ratio(1, 2), Q::ratio(1, 2), Q::ratio(1, 2)];
                t.check(fp.coeffs == want && fp.quadruple == Letter::X.quadruple(), || {
                    format!("coefficients {:?} on {:?}", fp.coeffs, fp.quadruple)
                });
            }
            Err(e) => t.check(false, || e.to_string()),
        }
    }
    t.finish("grover", ANCHOR_GROVER, Method::ExactExhaustive, 0, "")
}

/// `(fid, pbar, point, matrix)` at a random rational point and random prefix.
fn family_samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<(FamilyId, Perm4, ParamPoint<Q>, Mat4<Q>)> {
    let prefixes = Perm4::fixing_one();
    let mut out = Vec::new();
    for fid in FamilyId::all() {
        for _ in 0..n {
            let p = rational_point_for(fid, &random_rational(rng), random_sign(rng)).expect("nonzero parameter");
            let pbar = prefixes[rng.gen_range(0..prefixes.len())];
            let m = family_element(fid, &p, &pbar, 0.0).expect("rational points lie on the conic");
            out.push((fid, pbar, p, m));
        }
    }
    out
}

fn verify_rational_points(seed: u64, n: usize) -> ReportEntry {
    let mut t = Tally::default();
    for (fid, pbar, p, m) in family_samples(&mut rng_for(seed, 0x300), n) {
        let line = Q::from_i64(fid.line_sum());
        t.check(
            m.is_orthogonal() && m.is_permutative() && m.common_line_sum() == Some(line),
            || format!("{fid} at ({}, {}) with prefix {pbar}: {m:?}", p.x, p.z),
        );
        t.check(family_member(&m, fid, &pbar).as_ref() == Some(&p), || format!("{fid} point not recovered from {m:?}"));
    }
    t.finish("rational-points", ANCHOR_RATIONAL, Method::ExactSampled, n, "per set, all twelve sets")
}

fn verify_determinants(seed: u64, n: usize) -> ReportEntry {
    let mut t = Tally::default();
    for (fid, pbar, p, m) in family_samples(&mut rng_for(seed, 0x400), n) {
        let bare = family_element(fid, &p, &Perm4::identity(), 0.0).expect("sampled point");
        let d = bare.det();
        t.check(d == Q::from_i64(fid.det_class()), || format!("{fid}: det {d} for {bare:?}"));
        let prefixed = m.det();
        let expected = d * pbar.to_matrix::<Q>().det();
        t.check(prefixed == expected, || format!("P{pbar}{fid}: det {prefixed} for {m:?}"));
    }
    t.finish("determinants", ANCHOR_DET, Method::ExactSampled, n, "per set, all twelve sets; prefixed members scale by the sign of the prefix")
}

fn trig_endpoints(which: TrigFamily) -> (Perm4, Perm4) {
    match which {
        TrigFamily::X1 => (p4("(13)(24)"), p4("(14)(23)")),
        TrigFamily::Y1 => (p4("(12)(34)"), p4("(14)(23)")),
        TrigFamily::Z1 => (p4("(12)(34)"), p4("(13)(24)")),
    }
}

/// `n` angles spread evenly over `[−π, π]`, ends included.
pub fn theta_grid(n: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|k| -pi + 2.0 * pi * k as f64 / (n - 1) as f64).collect(),
    }
}

fn verify_trig(n: usize) -> ReportEntry {
    let mut t = Tally::default();
    let pi = std::f64::consts::PI;
    for which in [TrigFamily::X1, TrigFamily::Y1, TrigFamily::Z1] {
        let fid = FamilyId { letter: which.letter(), j: 1 };
        for theta in theta_grid(n) {
            let m = trig_family(theta, which);
            let residual = m.orthogonality_residual();
            let loose = m.clone().with_tol(1e-10);
            t.check(residual < 1e-12 && loose.is_permutative(), || format!("{which:?} at {theta}: residual {residual:e}"));
            t.check(family_member(&loose, fid, &Perm4::identity()).is_some(), || {
                format!("{which:?} at {theta} is off the {fid} conic")
            });
        }
        let (zero, end) = trig_endpoints(which);
        for (theta, p) in [(0.0, zero), (pi, end)] {
            let gap = trig_family(theta, which).max_abs_diff(&p.to_matrix());
            t.check(gap <= 1e-15, || format!("{which:?} at {theta} differs from P{p} by {gap:e}"));
        }
    }
    t.finish("trig-curves", ANCHOR_TRIG, Method::ApproxSampled, n, "per family, evenly spaced angles")
}

fn trig_family(theta: f64, which: TrigFamily) -> Mat4<f64> {
    crate::families::trig_family(theta, which).expect("grid lies in [-pi, pi]")
}

fn verify_four_perms(seed: u64, n: usize) -> ReportEntry {
    let mut t = Tally::default();
    for (fid, pbar, _, m) in family_samples(&mut rng_for(seed, 0x500), n) {
        let w = OpmWitness::Family(FamilyWitness { fid, pbar, point: family_member(&m, fid, &pbar).expect("member") });
        match opm_as_four_perms(&m, &w) {
            Ok(fp) => {
                let s = fp.combination.support();
                let h_orth = s.iter().enumerate().all(|(i, p)| s[i + 1..].iter().all(|q| p.h_orthogonal(q)));
                t.check(fp.combination.evaluate() == m && s.len() <= 4 && h_orth, || format!("{fid}: {m:?}"));
            }
            Err(e) => t.check(false, || format!("{fid}: {e}")),
        }
    }
    t.finish("four-permutation-form", ANCHOR_FOUR_PERMS, Method::ExactSampled, n, "per set, all twelve sets")
}

fn verify_line_sums(seed: u64, n: usize) -> ReportEntry {
    let mut rng = rng_for(seed, 0x600);
    let mut t = Tally::default();
    for k in 0..n {
        let a = random_orthogonal(&mut rng, Source::ALL[k % Source::ALL.len()]);
        let Some(c) = in_perm_span(&a) else {
            t.check(false, || format!("not in the span: {a:?}"));
            continue;
        };
        let s = c.coefficient_sum();
        let ok_sum = a.common_line_sum() == Some(s.clone()) && (s == Q::one() || s == -Q::one());
        let h = a.conjugate_hadamard();
        let ok_block = h[(0, 0)] == s && (1..4).all(|i| h[(0, i)] == Q::zero() && h[(i, 0)] == Q::zero());
        t.check(ok_sum && ok_block, || format!("{a:?}"));
    }
    t.finish("line-sums", ANCHOR_LINE_SUM, Method::ExactSampled, n, "orthogonal samples in the span")
}

fn verify_partition() -> ReportEntry {
    let mut t = Tally::default();
    let classes = s4_partition();
    let mut seen: Vec<Perm4> = classes.iter().flat_map(|c| c.members).collect();
    seen.sort();
    seen.dedup();
    t.check(seen.len() == 24, || format!("{} distinct permutations", seen.len()));
    for c in &classes {
        let m = &c.members;
        let h_orth = (0..4).all(|i| (i + 1..4).all(|j| m[i].h_orthogonal(&m[j])));
        let sum = PermLinComb::from_terms(m.iter().map(|p| (*p, Q::one()))).evaluate();
        t.check(h_orth && sum == Mat4::all_ones(), || format!("class {}: {:?}", c.index, c.members));
    }
    t.finish("partition", ANCHOR_PARTITION, Method::ExactExhaustive, 0, "six classes of S4")
}

fn verify_six_split(seed: u64, n: usize) -> ReportEntry {
    let mut rng = rng_for(seed, 0x700);
    let mut t = Tally::default();
    for _ in 0..n {
        let c = PermLinComb::from_terms(Perm4::all().into_iter().map(|p| (p, random_rational(&mut rng))));
        let parts = split_six_permutative(&c);
        let total = parts.iter().fold(Mat4::<Q>::zero(), |acc, (_, m)| acc + m.clone());
        t.check(
            parts.len() <= 6 && parts.iter().all(|(_, m)| m.is_permutative()) && total == c.evaluate(),
            || format!("{c:?}"),
        );
    }
    t.finish("six-permutative-split", ANCHOR_SIX_SPLIT, Method::ExactSampled, n, "24-term combinations")
}

/// Orthogonal outcomes of `A + cP` must be permutative. Half the draws take
/// `P` from the support of `A`, the rest are arbitrary.
fn verify_add_perm(seed: u64, n: usize) -> ReportEntry {
    let mut rng = rng_for(seed, 0x800);
    let mut t = Tally::default();
    let mut orthogonal = 0usize;
    for k in 0..n {
        let (fid, m) = random_family_element(&mut rng);
        let w = opm_witness(&m).expect("family element");
        let comb = opm_as_four_perms(&m, &w).expect("witness reproduces").combination;
        let support = comb.support();
        let p = if k % 2 == 0 { support[rng.gen_range(0..support.len())] } else { random_perm(&mut rng) };
        let c = if k % 4 == 0 { Q::zero() } else { random_rational(&mut rng) };
        match add_perm_preserves_opm(&comb, &c, &p) {
            Ok(AddPermOutcome::Orthogonal { matrix, permutative }) => {
                orthogonal += 1;
                t.check(permutative, || format!("{fid} + ({c})P{p} is orthogonal, not permutative: {matrix:?}"));
            }
            Ok(AddPermOutcome::NotOrthogonal { matrix }) => {
                if support.contains(&p) {
                    t.check(matrix.is_permutative(), || format!("{fid} + ({c})P{p} lost permutativity"));
                }
            }
            Err(e) => t.check(false, || format!("{fid}: {e}")),
        }
    }
    let note = format!("{orthogonal} orthogonal outcomes");
    t.finish("add-permutation", ANCHOR_ADD_PERM, Method::ExactSampled, n, &note)
}

fn verify_two_perms() -> ReportEntry {
    let mut t = Tally::default();
    let scan = two_perm_orthogonality_scan();
    for r in &scan.pairs {
        t.check(r.solutions.is_some() && r.trivial(), || format!("{} and {}: {:?}", r.p, r.q, r.solutions));
    }
    let note = format!("{} pairs, {} nontrivial", scan.pairs.len(), scan.nontrivial);
    t.finish("two-permutations", ANCHOR_TWO_PERMS, Method::ExactExhaustive, 0, &note)
}

fn scalar_matrix(ps: &[Perm4; 3], coeffs: &[Scalar; 3]) -> Mat4<f64> {
    PermLinComb::from_terms(ps.iter().copied().zip(coeffs.iter().map(Scalar::to_f64))).evaluate()
}

fn verify_three_perms() -> ReportEntry {
    let mut t = Tally::default();
    let scan = match three_perm_scan() {
        Ok(s) => s,
        Err(e) => {
            t.check(false, || e.to_string());
            return t.finish("three-permutations", ANCHOR_THREE_PERMS, Method::ExactExhaustive, 0, "");
        }
    };
    let mut direct = 0usize;
    for o in &scan.orbits {
        for s in &o.solutions {
            let a = scalar_matrix(&o.representative, &s.coeffs);
            let signed = signed_permutation(&a).is_some();
            let one_three = find_direct_sum_form(&a).is_some_and(|f| f.sizes == [1, 3]);
            direct += usize::from(!signed && one_three);
            t.check(signed || one_three, || {
                format!("{:?} with coefficients {:?} tagged {}", o.representative, s.coeffs, s.tag)
            });
        }
    }
    let note = format!(
        "{} triples in {} orbits, {} direct sums, {} irreducible",
        scan.triples,
        scan.orbits.len(),
        direct,
        scan.irreducible
    );
    t.check(scan.irreducible == 0, || "irreducible solutions found".into());
    t.finish("three-permutations", ANCHOR_THREE_PERMS, Method::ExactExhaustive, 0, &note)
}

/// The counterexample pattern from the proof for the covered pairs.
pub fn proof_pattern() -> Pattern4 {
    Pattern4::parse_rows(&["1100", "1011", "0011", "1110"]).expect("literal")
}

fn verify_pattern_sweep() -> ReportEntry {
    let mut t = Tally::default();
    let mut strong = 0usize;
    for mask in 0..1u64 << 16 {
        let p = Pattern4::from_mask(mask);
        if p.is_strongly_quadrangular() {
            strong += 1;
            t.check(p.is_quadrangular(), || format!("{p}"));
        }
    }
    t.check(!proof_pattern().is_quadrangular(), || "fixture pattern is quadrangular".into());
    for p in Perm4::all() {
        t.check(pattern_of(&p.to_matrix::<Q>()).is_strongly_quadrangular(), || format!("pattern of P{p}"));
    }
    let note = format!("{strong} strongly quadrangular patterns of 65536");
    t.finish("pattern-sweep", ANCHOR_SUPPORT, Method::ExactExhaustive, 0, &note)
}

fn verify_supports(seed: u64, n: usize) -> ReportEntry {
    let mut rng = rng_for(seed, 0x900);
    let mut t = Tally::default();
    for k in 0..n {
        let a = random_orthogonal(&mut rng, Source::ALL[k % Source::ALL.len()]);
        let p = pattern_of(&a);
        t.check(p.is_strongly_quadrangular(), || format!("{a:?} has support {p}"));
    }
    t.finish("orthogonal-supports", ANCHOR_SUPPORT, Method::ExactSampled, n, "orthogonal samples in the span")
}

/// `−2/7·P(123) + 6/7·P(124) + 3/7·P(12)(34)`: orthogonal, in `𝖫₂ ⊕ 𝖫₃ ⊕ 𝖫₄`,
/// and a direct sum rather than an OPM.
pub fn triple_space_direct_sum() -> Mat4<Q> {
    PermLinComb::from_terms([
        (p4("(123)"), Q::ratio(-2, 7)),
        (p4("(124)"), Q::ratio(6, 7)),
        (p4("(12)(34)"), Q::ratio(3, 7)),
    ])
    .evaluate()
}

/// One entry per structural result, each over the sampled matrices whose
/// membership it covers. Fixed fixtures are added to the affected results.
fn verify_gates(seed: u64, n: usize) -> Vec<ReportEntry> {
    let mut rng = rng_for(seed, 0xA00);
    let samples = covered_samples(&mut rng, n);
    let mut rows: Vec<(Mat4<Q>, Subspaces, Vec<GateRule>, Tag)> = samples
        .into_iter()
        .map(|s| {
            let tag = classify_orthogonal(&s.matrix).tag();
            let rules = s.gate.rules.iter().map(|(r, _)| *r).collect();
            (s.matrix, s.gate.membership, rules, tag)
        })
        .collect();
    let fixture = triple_space_direct_sum();
    if let Some(g) = crate::classify::theorem_gate(&fixture) {
        let tag = classify_orthogonal(&fixture).tag();
        rows.push((fixture, g.membership, g.rules.iter().map(|(r, _)| *r).collect(), tag));
    }
    let rules = [
        GateRule::Single,
        GateRule::Pair,
        GateRule::L1WithPair,
        GateRule::L1L3L4,
        GateRule::TripleWithoutL1,
        GateRule::L2L3L4L5,
    ];
    rules
        .iter()
        .map(|&rule| {
            let mut t = Tally::default();
            let mut count = 0usize;
            for (a, membership, rs, tag) in &rows {
                if rs.contains(&rule) {
                    count += 1;
                    t.check(rule.permitted().contains(tag), || format!("membership {membership}, tag {tag}: {a:?}"));
                }
            }
            let note = if count == 0 { "no sample fell in these spaces".to_string() } else { String::new() };
            let mut e = t.finish(gate_claim(rule), gate_anchor(rule), Method::ExactSampled, count, &note);
            if count == 0 {
                e.passed = true;
            }
            e
        })
        .collect()
}

fn verify_c_sets(seed: u64, n: usize) -> ReportEntry {
    let mut rng = rng_for(seed, 0xB00);
    let mut t = Tally::default();
    let mut corners = std::collections::BTreeSet::new();
    for k in 0..n {
        let which = if k % 2 == 0 { CSet::C1 } else { CSet::C2 };
        let branch = random_sign(&mut rng);
        let c2 = which.rational_c2(&random_rational(&mut rng));
        let m = match c_set_element(which, &c2, branch) {
            Ok(m) => m,
            Err(e) => {
                t.check(false, || format!("{which:?} at {c2}: {e}"));
                continue;
            }
        };
        check_c_block(&mut t, which, &m, &mut corners, &c2.to_string());
    }
    let note = format!("corners {corners:?}");
    t.finish("c-sets", ANCHOR_C_SETS, Method::ExactSampled, n, &note)
}

fn verify_c_sets_approx(seed: u64, n: usize) -> ReportEntry {
    let mut rng = rng_for(seed, 0xB80);
    let mut t = Tally::default();
    let mut corners = std::collections::BTreeSet::new();
    for k in 0..n {
        let which = if k % 2 == 0 { CSet::C1 } else { CSet::C2 };
        let (lo, hi) = which.interval();
        let (lo, hi) = (lo.to_f64(), hi.to_f64());
        let c2 = match k % 8 {
            0 | 1 => lo,
            2 | 3 => hi,
            _ => rng.gen_range(lo..=hi),
        };
        let m = match c_set_element::<f64>(which, &c2, random_sign(&mut rng)) {
            Ok(m) => m.with_tol(1e-10),
            Err(e) => {
                t.check(false, || format!("{which:?} at {c2}: {e}"));
                continue;
            }
        };
        check_c_block(&mut t, which, &m, &mut corners, &c2.to_string());
    }
    let note = format!("corners {corners:?}, interval ends included");
    t.finish("c-sets-float", ANCHOR_C_SETS, Method::ApproxSampled, n, &note)
}

fn check_c_block<F: Field>(
    t: &mut Tally,
    which: CSet,
    m: &Mat4<F>,
    corners: &mut std::collections::BTreeSet<i64>,
    c2: &str,
) {
    let tol = m.tol();
    let h = m.conjugate_hadamard();
    let corner = h[(0, 0)].clone();
    let unit = corner.near(&F::one(), tol) || corner.near(&-F::one(), tol);
    if unit {
        corners.insert(if corner.is_negative() { -1 } else { 1 });
    }
    let off = (1..4).all(|i| h[(0, i)].near_zero(tol) && h[(i, 0)].near_zero(tol));
    let block = h.trailing_block();
    let line = F::from_i64(which.block_line_sum());
    let sums_ok = block.row_sums().iter().chain(block.col_sums().iter()).all(|s| s.near(&line, tol));
    let member = crate::families::c_bar_membership(which, &block).is_some();
    t.check(m.is_orthogonal() && unit && off && sums_ok && member, || format!("{which:?} at c2 = {c2}: HMH = {h:?}"));
}

fn verify_catalog(seed: u64, n: usize) -> ReportEntry {
    let mut rng = rng_for(seed, 0xC00);
    let mut t = Tally::default();
    for _ in 0..n {
        let a = random_orthogonal(&mut rng, Source::DirectSum);
        let Some(entry) = direct_sum_catalog(&a) else {
            t.check(false, || format!("no catalog entry: {a:?}"));
            continue;
        };
        let sets_ok = match &entry.summands {
            Summands::ScalarOpm3 { corner, sets, .. } => {
                let allowed: &[Opm3Set] = if *corner == Q::one() {
                    &[Opm3Set::XBar1, Opm3Set::ZBar1]
                } else {
                    &[Opm3Set::YBarM1, Opm3Set::WBarM1]
                };
                !sets.is_empty() && sets.iter().all(|(s, _, _)| allowed.contains(s))
            }
            Summands::Permutation { .. } => signed_permutation(&a).is_some(),
        };
        t.check(sets_ok && entry.reconstruct() == a, || format!("{a:?} catalogued as {:?}", entry.summands));
    }
    t.finish("direct-sum-catalog", ANCHOR_CATALOG, Method::ExactSampled, n, "permuted direct sums")
}

/// The orthogonal matrix `M` with none of the structures above.
pub fn conclusion_matrix() -> Mat4<Q> {
    qmat([[10, -2, -1, 4], [-2, 7, -2, 8], [-1, -2, 10, 4], [4, 8, 4, -5]], 11)
}

/// The printed expansion of [`conclusion_matrix`].
pub fn conclusion_coefficients() -> Vec<(Perm4, Q)> {
    [("(12)", 1), ("(34)", 7), ("(13)(24)", -1), ("(14)(23)", 4), ("(24)", 9), ("(12)(34)", -3), ("(23)", -6)]
        .iter()
        .map(|&(p, n)| (p4(p), Q::ratio(n, 11)))
        .collect()
}

fn verify_conclusion() -> ReportEntry {
    let mut t = Tally::default();
    let m = conclusion_matrix();
    t.check(m.is_orthogonal() && !m.is_permutative(), || format!("{m:?}"));
    match in_perm_span(&m) {
        Some(c) => {
            let want = PermLinComb::from_terms(conclusion_coefficients());
            t.check(c == want, || format!("recovered {c:?}"));
            let s = membership_of(&c);
            t.check(s == Subspaces::of(&[1, 2, 5]), || format!("membership {s}"));
        }
        None => t.check(false, || "not in the span".into()),
    }
    t.check(find_direct_sum_form(&m).is_none(), || "has a direct sum form".into());
    t.check(hadamard_block_search(&m).is_none(), || "has a Hadamard block form".into());
    let c = classify_orthogonal(&m);
    t.check(c == Classification::Irreducible, || format!("classified {}", c.tag()));
    t.finish("conclusion-matrix", ANCHOR_CONCLUSION, Method::ExactExhaustive, 0, "576-pair searches")
}

/// Every check in a fixed order. With `samples == 0` only the exhaustive
/// entries run.
pub fn run_all(seed: u64, samples: usize) -> SuiteReport {
    let mut entries = vec![verify_grover()];
    let n = samples;
    if n > 0 {
        entries.push(verify_rational_points(seed, n));
        entries.push(verify_determinants(seed, n));
        entries.push(verify_four_perms(seed, n));
        entries.push(verify_trig(n));
        for chain in Chain::ALL {
            entries.push(verify_group_chain(chain, n, seed).expect("n > 0"));
        }
        entries.push(verify_commutative_remark_with(n, seed));
        entries.push(verify_nonclosure_example());
        entries.push(verify_line_sums(seed, n));
    }
    entries.push(verify_partition());
    if n > 0 {
        entries.push(verify_six_split(seed, n));
        entries.push(verify_add_perm(seed, n));
    }
    entries.push(verify_two_perms());
    entries.push(verify_three_perms());
    entries.push(verify_pattern_sweep());
    if n > 0 {
        entries.push(verify_supports(seed, n));
        entries.extend(verify_gates(seed, n));
        entries.push(verify_c_sets(seed, n));
        entries.push(verify_c_sets_approx(seed, n));
        entries.push(verify_catalog(seed, n));
    }
    entries.push(verify_conclusion());
    SuiteReport { seed, samples, entries }
}
