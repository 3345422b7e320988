//! Orthogonal linear combinations of two or three permutation matrices.
//!
//! For `A = Σ cₖ P_{pₖ}` the Gram matrix is
//! `AᵀA = (Σ cₖ²) I + Σ_{k<l} cₖ c_l (P_kᵀP_l + P_lᵀP_k)`, so orthogonality is
//! one quadratic equation per entry on or above the diagonal. Off-diagonal
//! equations involve only the products `cₖ c_l`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::classify::{classify_orthogonal, Classification, Tag};
use crate::error::{Error, Result};
use crate::linalg::{kernel, rref, Dense};
use crate::mat::Mat4;
use crate::perm::Perm4;
use crate::scalar::{Field, FromScalar, Scalar, Q};

/// One entry of `AᵀA = I`: `[diag](Σ cₖ²) + Σ cross[k,l] cₖ c_l = [diag]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct GramEquation {
    diag: bool,
    cross: Vec<i64>,
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l))).collect()
}

/// `(P_kᵀ P_l)(i, j) = [p_l(p_k⁻¹(i)) = j]`.
fn gram_cross(pk: &Perm4, pl: &Perm4, i: usize, j: usize) -> i64 {
    let m = pk.inverse().apply(i);
    i64::from(pl.apply(m) == j)
}

fn gram_equations(ps: &[Perm4]) -> Vec<GramEquation> {
    let idx = pairs(ps.len());
    let mut eqs = BTreeSet::new();
    for i in 0..4 {
        for j in i..4 {
            let cross = idx
                .iter()
                .map(|&(k, l)| gram_cross(&ps[k], &ps[l], i, j) + gram_cross(&ps[l], &ps[k], i, j))
                .collect();
            eqs.insert(GramEquation { diag: i == j, cross });
        }
    }
    eqs.into_iter().filter(|e| e.diag || e.cross.iter().any(|&c| c != 0)).collect()
}

fn holds<F: Field>(eqs: &[GramEquation], c: &[F]) -> bool {
    let idx = pairs(c.len());
    eqs.iter().all(|e| {
        let mut v = F::zero();
        if e.diag {
            v = c.iter().fold(v, |acc, x| acc + x.square()) - F::one();
        }
        for (&(k, l), &m) in idx.iter().zip(&e.cross) {
            if m != 0 {
                v = v + F::from_i64(m) * c[k].clone() * c[l].clone();
            }
        }
        v.near_zero(if F::EXACT { 0.0 } else { 1e-9 })
    })
}

fn combination<F: Field>(ps: &[Perm4], c: &[F]) -> Mat4<F> {
    ps.iter().zip(c).fold(Mat4::zero(), |acc, (p, x)| acc + p.to_matrix::<F>().scale(x))
}

const GREEK: [&str; 3] = ["α", "β", "γ"];

fn describe(eq: &GramEquation, n: usize) -> String {
    let mut terms: Vec<String> = Vec::new();
    if eq.diag {
        terms.push(GREEK[..n].iter().map(|g| format!("{g}²")).collect::<Vec<_>>().join("+"));
    }
    for (&(k, l), &m) in pairs(n).iter().zip(&eq.cross) {
        if m != 0 {
            let coef = if m == 1 { String::new() } else { m.to_string() };
            terms.push(format!("{coef}{}{}", GREEK[k], GREEK[l]));
        }
    }
    format!("{} = {}", terms.join(" + "), i64::from(eq.diag))
}

/// Report for one unordered pair `{P, Q}`.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub p: Perm4,
    pub q: Perm4,
    /// Positions where `p` and `q` agree.
    pub overlap: usize,
    pub h_orthogonal: bool,
    pub conditions: Vec<String>,
    /// Every `(α, β)` with `αP + βQ` orthogonal; `None` if the case analysis
    /// did not close.
    pub solutions: Option<Vec<(Scalar, Scalar)>>,
}

impl PairReport {
    /// Only `(±1, 0)` and `(0, ±1)` occur.
    pub fn trivial(&self) -> bool {
        self.solutions.as_ref().is_some_and(|s| s.iter().all(|(a, b)| a.to_f64() == 0.0 || b.to_f64() == 0.0))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoPermScan {
    pub pairs: Vec<PairReport>,
    pub nontrivial: usize,
}

/// Exact solutions of the pair system: an equation `m·αβ = 0` with `m ≠ 0`
/// forces a zero coefficient, after which the diagonal equations read
/// `α² = 1` or `β² = 1`.
fn solve_pair(eqs: &[GramEquation]) -> Option<Vec<(Q, Q)>> {
    if !eqs.iter().any(|e| !e.diag && e.cross[0] != 0) {
        return None;
    }
    let mut out = Vec::new();
    let zero = Q::zero();
    for (a, b) in [(Q::one(), zero.clone()), (-Q::one(), zero.clone()), (zero.clone(), Q::one()), (zero, -Q::one())] {
        if holds(eqs, &[a.clone(), b.clone()]) {
            out.push((a, b));
        }
    }
    Some(out)
}

pub fn pair_report(p: &Perm4, q: &Perm4) -> PairReport {
    let ps = [*p, *q];
    let eqs = gram_equations(&ps);
    let solutions = solve_pair(&eqs).map(|sols| {
        sols.into_iter()
            .filter(|(a, b)| combination(&ps, &[a.clone(), b.clone()]).is_orthogonal())
            .map(|(a, b)| (Scalar::Exact(a), Scalar::Exact(b)))
            .collect()
    });
    PairReport {
        p: *p,
        q: *q,
        overlap: p.agreements(q),
        h_orthogonal: p.h_orthogonal(q),
        conditions: eqs.iter().map(|e| describe(e, 2)).collect(),
        solutions,
    }
}

/// All 276 unordered pairs of distinct permutations.
pub fn two_perm_orthogonality_scan() -> TwoPermScan {
    let all = Perm4::all();
    let mut reports = Vec::new();
    for (i, p) in all.iter().enumerate() {
        for q in &all[i + 1..] {
            reports.push(pair_report(p, q));
        }
    }
    let nontrivial = reports.iter().filter(|r| !r.trivial()).count();
    TwoPermScan { pairs: reports, nontrivial }
}

/// `αP + βQ + γR`, classified.
pub fn three_perm_classify<F: Field>(p: &Perm4, q: &Perm4, r: &Perm4, coeffs: [F; 3]) -> Result<Classification<F>> {
    if p == q || q == r || p == r {
        return Err(Error::Invalid("permutations must be distinct".into()));
    }
    let a = combination(&[*p, *q, *r], &coeffs);
    if !a.is_orthogonal() {
        return Err(Error::NotOrthogonal);
    }
    Ok(classify_orthogonal(&a))
}

/// An orthogonal combination found by the scan.
#[derive(Clone, Debug, Serialize)]
pub struct TripleSolution {
    pub coeffs: [Scalar; 3],
    pub tag: Tag,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub representative: [Perm4; 3],
    pub orbit_size: usize,
    /// Dimension of the solution space of the off-diagonal equations in
    /// `(αβ, αγ, βγ)`.
    pub kernel_dim: usize,
    pub conditions: Vec<String>,
    pub solutions: Vec<TripleSolution>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThreePermScan {
    pub triples: usize,
    pub orbits: Vec<OrbitReport>,
    pub irreducible: usize,
}

fn canonical_triple(t: [Perm4; 3], perms: &[Perm4]) -> [Perm4; 3] {
    let mut best = t;
    best.sort();
    for x in perms {
        for y in perms {
            let mut c = t.map(|p| x.compose(&p).compose(y));
            c.sort();
            if c < best {
                best = c;
            }
        }
    }
    best
}

/// Classes of 3-subsets of `S₄` under `{p,q,r} ↦ {x∘p∘y, …}`, with sizes.
pub fn triple_orbits() -> Vec<([Perm4; 3], usize)> {
    let all = Perm4::all();
    let mut counts: std::collections::BTreeMap<[Perm4; 3], usize> = Default::default();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            for k in j + 1..all.len() {
                *counts.entry(canonical_triple([all[i], all[j], all[k]], &all)).or_default() += 1;
            }
        }
    }
    counts.into_iter().collect()
}

/// Sample values of `β/α` used on one-parameter solution curves.
fn curve_parameters() -> Vec<Q> {
    let mut ts = BTreeSet::new();
    for n in -6i64..=6 {
        for d in 1i64..=4 {
            if n != 0 {
                ts.insert(Q::ratio(n, d));
            }
        }
    }
    ts.into_iter().collect()
}

fn q_to_f64(v: &Q) -> f64 {
    Field::to_f64(v)
}

/// `α = ±√(α²)`, `β = tα`, `γ = sα`, exact when `α²` is a rational square.
fn from_ratios(alpha_sq: &Q, t: &Q, s: &Q) -> Vec<[Scalar; 3]> {
    if let Some(a) = alpha_sq.sqrt() {
        [a.clone(), -a]
            .into_iter()
            .map(|a| [Scalar::Exact(a.clone()), Scalar::Exact(t.clone() * a.clone()), Scalar::Exact(s.clone() * a)])
            .collect()
    } else {
        let a = q_to_f64(alpha_sq).sqrt();
        let (t, s) = (q_to_f64(t), q_to_f64(s));
        [a, -a].into_iter().map(|a| [Scalar::Approx(a), Scalar::Approx(t * a), Scalar::Approx(s * a)]).collect()
    }
}

/// Cross coefficients of the diagonal equations: twice the fixed-point
/// indicator of `p_k⁻¹∘p_l`.
fn diagonal_rows(eqs: &[GramEquation]) -> Vec<Vec<Q>> {
    eqs.iter().filter(|e| e.diag).map(|e| e.cross.iter().map(|&m| Q::from_i64(m)).collect()).collect()
}

/// Solutions with all three coefficients nonzero.
fn solve_full_support(eqs: &[GramEquation]) -> (usize, Vec<[Scalar; 3]>) {
    let off: Dense<Q> =
        eqs.iter().filter(|e| !e.diag).map(|e| e.cross.iter().map(|&m| Q::from_i64(m)).collect()).collect();
    let ker = if off.is_empty() {
        vec![vec![Q::one(), Q::zero(), Q::zero()], vec![Q::zero(), Q::one(), Q::zero()], vec![Q::zero(), Q::zero(), Q::one()]]
    } else {
        kernel(&off, 0.0)
    };
    let diag = diagonal_rows(eqs);
    let mut out = Vec::new();
    match ker.len() {
        1 => {
            // (αβ, αγ, βγ) = τ·k, so α² = τ k₁k₂/k₃ and each diagonal
            // equation becomes τ·cᵢ = 1.
            let k = &ker[0];
            if k.iter().any(|v| v.near_zero(0.0)) {
                return (1, out);
            }
            let base = k[0].clone() * k[1].clone() / k[2].clone()
                + k[0].clone() * k[2].clone() / k[1].clone()
                + k[1].clone() * k[2].clone() / k[0].clone();
            let cs: Vec<Q> = diag
                .iter()
                .map(|row| base.clone() + row.iter().zip(k).fold(Q::zero(), |a, (f, v)| a + f * v))
                .collect();
            if cs.iter().any(|c| *c != cs[0]) || cs[0].near_zero(0.0) {
                return (1, out);
            }
            let tau = Q::one() / cs[0].clone();
            let alpha_sq = tau.clone() * k[0].clone() * k[1].clone() / k[2].clone();
            if alpha_sq > Q::zero() {
                let t = tau.clone() * k[0].clone() / alpha_sq.clone();
                let s = tau * k[1].clone() / alpha_sq.clone();
                out.extend(from_ratios(&alpha_sq, &t, &s));
            }
        }
        2 => {
            // One linear relation n·(αβ, αγ, βγ) = 0; with t = β/α, s = γ/α it
            // reads n₁t + n₂s + n₃ts = 0.
            let mut m = off.clone();
            rref(&mut m, 0.0);
            let n = &m[0];
            for t in curve_parameters() {
                let den = n[1].clone() + n[2].clone() * t.clone();
                if den.near_zero(0.0) {
                    continue;
                }
                let s = -(n[0].clone() * t.clone()) / den;
                if s.near_zero(0.0) {
                    continue;
                }
                let ds: Vec<Q> = diag
                    .iter()
                    .map(|row| {
                        Q::one()
                            + t.square()
                            + s.square()
                            + row[0].clone() * t.clone()
                            + row[1].clone() * s.clone()
                            + row[2].clone() * t.clone() * s.clone()
                    })
                    .collect();
                if ds.iter().any(|d| *d != ds[0]) || ds[0] <= Q::zero() {
                    continue;
                }
                out.extend(from_ratios(&(Q::one() / ds[0].clone()), &t, &s));
            }
        }
        _ => {}
    }
    (ker.len(), out)
}

fn classify_scalars(ps: &[Perm4; 3], c: &[Scalar; 3]) -> Result<Tag> {
    if c.iter().all(Scalar::is_exact) {
        let v: Vec<Q> = c.iter().map(Q::from_scalar).collect::<Result<_>>()?;
        three_perm_classify(&ps[0], &ps[1], &ps[2], [v[0].clone(), v[1].clone(), v[2].clone()]).map(|c| c.tag())
    } else {
        let v: Vec<f64> = c.iter().map(Scalar::to_f64).collect();
        three_perm_classify(&ps[0], &ps[1], &ps[2], [v[0], v[1], v[2]]).map(|c| c.tag())
    }
}

/// Orthogonal combinations of one triple: the zero-coefficient cases come
/// from the pair systems, the rest from the kernel analysis.
pub fn triple_report(ps: [Perm4; 3], orbit_size: usize) -> Result<OrbitReport> {
    let eqs = gram_equations(&ps);
    let mut coeffs: Vec<[Scalar; 3]> = Vec::new();
    for (k, l) in pairs(3) {
        let pair = pair_report(&ps[k], &ps[l]);
        for (a, b) in pair.solutions.ok_or_else(|| Error::Invalid("pair system unresolved".into()))? {
            let mut c = [Scalar::Exact(Q::zero()), Scalar::Exact(Q::zero()), Scalar::Exact(Q::zero())];
            c[k] = a;
            c[l] = b;
            if !coeffs.contains(&c) {
                coeffs.push(c);
            }
        }
    }
    let (kernel_dim, full) = solve_full_support(&eqs);
    coeffs.extend(full);
    let solutions = coeffs
        .into_iter()
        .map(|c| classify_scalars(&ps, &c).map(|tag| TripleSolution { coeffs: c, tag }))
        .collect::<Result<_>>()?;
    Ok(OrbitReport {
        representative: ps,
        orbit_size,
        kernel_dim,
        conditions: eqs.iter().map(|e| describe(e, 3)).collect(),
        solutions,
    })
}

/// Every class of permutation triples, with its orthogonal combinations
/// classified.
pub fn three_perm_scan() -> Result<ThreePermScan> {
    let orbits: Vec<OrbitReport> =
        triple_orbits().into_iter().map(|(t, n)| triple_report(t, n)).collect::<Result<_>>()?;
    let triples = orbits.iter().map(|o| o.orbit_size).sum();
    let irreducible = orbits
        .iter()
        .flat_map(|o| &o.solutions)
        .filter(|s| !matches!(s.tag, Tag::Permutative | Tag::PermEquivalentDirectSum))
        .count();
    Ok(ThreePermScan { triples, orbits, irreducible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::p4;
    use crate::scalar::q;

    #[test]
    fn identity_and_transposition() {
        let r = pair_report(&Perm4::identity(), &p4("(12)"));
        let sols = r.solutions.clone().unwrap();
        assert_eq!(sols.len(), 4);
        assert!(r.trivial());
        assert_eq!(r.overlap, 2);
        assert!(r.conditions.contains(&"α²+β² + 2αβ = 1".to_string()), "{:?}", r.conditions);
    }

    #[test]
    fn h_orthogonal_pair() {
        let r = pair_report(&p4("(12)"), &p4("(34)"));
        assert!(r.h_orthogonal);
        assert!(r.trivial());
    }

    #[test]
    fn full_pair_scan() {
        let s = two_perm_orthogonality_scan();
        assert_eq!(s.pairs.len(), 276);
        assert_eq!(s.nontrivial, 0);
    }

    #[test]
    fn opening_example_of_three() {
        let c = three_perm_classify(&Perm4::identity(), &p4("(234)"), &p4("(243)"), [q(-1, 3), q(2, 3), q(2, 3)]).unwrap();
        assert_eq!(c.tag(), Tag::PermEquivalentDirectSum);
        let c = three_perm_classify(&Perm4::identity(), &p4("(12)"), &p4("(34)"), [q(1, 1), Q::zero(), Q::zero()]).unwrap();
        assert_eq!(c.tag(), Tag::Permutative);
        assert!(three_perm_classify(&Perm4::identity(), &p4("(12)"), &p4("(34)"), [q(1, 1), q(1, 1), Q::zero()]).is_err());
    }

    #[test]
    fn orbits_partition_all_triples() {
        let orbits = triple_orbits();
        assert_eq!(orbits.iter().map(|o| o.1).sum::<usize>(), 2024);
        for (t, _) in &orbits {
            assert_eq!(canonical_triple(*t, &Perm4::all()), *t);
        }
    }

    #[test]
    fn circulant_curve_has_exact_points() {
        let r = triple_report([Perm4::identity(), p4("(234)"), p4("(243)")], 1).unwrap();
        assert_eq!(r.kernel_dim, 2);
        let exact: Vec<_> = r.solutions.iter().filter(|s| s.coeffs.iter().all(Scalar::is_exact)).collect();
        assert!(exact.iter().any(|s| s.coeffs[0] == Scalar::Exact(q(6, 7))), "{:?}", r.solutions);
        assert!(r.solutions.iter().all(|s| matches!(s.tag, Tag::Permutative | Tag::PermEquivalentDirectSum)));
    }
}
