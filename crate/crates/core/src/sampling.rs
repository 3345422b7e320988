//! Seeded exact samples of orthogonal matrices in the span of permutation
//! matrices, built from rational points of the parametric families.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{theorem_gate_for, Gate};
use crate::decompose::{in_perm_span, membership_of};
use crate::families::{
    c_set_element, family_element, opm3_element, opm3_rational_point, rational_point_for, sporadic_opm, CSet,
    FamilyId, Opm3Set, Sign, SporadicKind,
};
use crate::mat::Mat4;
use crate::perm::Perm4;
use crate::scalar::{Field, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Family,
    Sporadic,
    DirectSum,
    HadamardDirectSum,
    CSet,
    Product,
}

impl Source {
    pub const ALL: [Source; 6] =
        [Source::Family, Source::Sporadic, Source::DirectSum, Source::HadamardDirectSum, Source::CSet, Source::Product];
}

/// Small nonzero random rational `n/d` with `1 ≤ |n| ≤ 24`, `1 ≤ d ≤ 12`.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Q {
    let n = rng.gen_range(1..=24) * if rng.gen_bool(0.5) { 1 } else { -1 };
    Q::ratio(n, rng.gen_range(1..=12))
}

pub fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn random_perm(rng: &mut ChaCha8Rng) -> Perm4 {
    *Perm4::all().choose(rng).expect("nonempty")
}

/// Exact family element at a random rational point and random prefix.
pub fn random_family_element(rng: &mut ChaCha8Rng) -> (FamilyId, Mat4<Q>) {
    let fid = *FamilyId::all().choose(rng).expect("nonempty");
    let r = random_rational(rng);
    let p = rational_point_for(fid, &r, random_sign(rng)).expect("rational points satisfy the constraint");
    let pbar = *Perm4::fixing_one().choose(rng).expect("nonempty");
    (fid, family_element(fid, &p, &pbar, 0.0).expect("valid point"))
}

/// `±1 ⊕ B` with `B` a random exact order-3 OPM of matching line sum.
pub fn random_direct_sum(rng: &mut ChaCha8Rng) -> Mat4<Q> {
    let which = *Opm3Set::ALL.choose(rng).expect("nonempty");
    let (x, y) = opm3_rational_point(which, &random_rational(rng));
    let b = opm3_element(which, &x, &y, 0.0).expect("rational point");
    Mat4::direct_sum(Q::from_i64(which.line_sum()), &b)
}

/// Exact `𝒞` element at a rational `c₂`.
pub fn random_c_set(rng: &mut ChaCha8Rng) -> Mat4<Q> {
    let which = if rng.gen_bool(0.5) { CSet::C1 } else { CSet::C2 };
    let c2 = which.rational_c2(&random_rational(rng));
    c_set_element(which, &c2, random_sign(rng)).expect("rational c2 has a square discriminant")
}

fn base_sample(rng: &mut ChaCha8Rng, source: Source) -> Mat4<Q> {
    match source {
        Source::Family => random_family_element(rng).1,
        Source::Sporadic => {
            let kind = if rng.gen_bool(0.5) { SporadicKind::Plain } else { SporadicKind::HalfJ };
            sporadic_opm(&random_perm(rng), random_sign(rng), kind)
        }
        Source::DirectSum => random_direct_sum(rng),
        Source::HadamardDirectSum => random_direct_sum(rng).conjugate_hadamard(),
        Source::CSet => random_c_set(rng),
        Source::Product => {
            let sa = *Source::ALL[..5].choose(rng).expect("nonempty");
            let a = base_sample(rng, sa);
            let sb = *Source::ALL[..5].choose(rng).expect("nonempty");
            let b = base_sample(rng, sb);
            a.matmul(&b)
        }
    }
}

/// A random exact orthogonal matrix in the span, from `source`, with random
/// row and column permutations applied.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, source: Source) -> Mat4<Q> {
    let a = base_sample(rng, source);
    a.permuted(&random_perm(rng), &random_perm(rng))
}

#[derive(Clone, Debug)]
pub struct CoveredSample {
    pub source: Source,
    pub matrix: Mat4<Q>,
    pub gate: Gate,
}

/// `n` samples whose minimal membership lies in a space some structural
/// result covers. Sources rotate so each contributes; draws outside the
/// covered spaces are discarded.
pub fn covered_samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<CoveredSample> {
    let mut out = Vec::with_capacity(n);
    let mut k = 0usize;
    while out.len() < n {
        let source = Source::ALL[k % Source::ALL.len()];
        k += 1;
        let matrix = random_orthogonal(rng, source);
        let Some(c) = in_perm_span(&matrix) else { continue };
        let gate = theorem_gate_for(membership_of(&c));
        if gate.applies() {
            out.push(CoveredSample { source, matrix, gate });
        }
    }
    out
}
