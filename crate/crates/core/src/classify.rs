//! Classification of orthogonal matrices in the span of permutation matrices.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blocks::{direct_sum_catalog, hadamard_block_search, CatalogEntry, HadamardBlock};
use crate::decompose::{in_perm_span, membership_of, Subspaces};
use crate::families::{opm_witness, witness_matrix, OpmWitness};
use crate::mat::Mat4;
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    NotOrthogonal,
    NotInSpan,
    Permutative,
    PermEquivalentDirectSum,
    HadamardBlock,
    Irreducible,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::NotOrthogonal => "not-orthogonal",
            Tag::NotInSpan => "not-in-span",
            Tag::Permutative => "permutative",
            Tag::PermEquivalentDirectSum => "perm-equivalent-direct-sum",
            Tag::HadamardBlock => "hadamard-block",
            Tag::Irreducible => "irreducible",
        }
    }

    /// Tags an orthogonal matrix of the span can receive.
    pub fn structural() -> [Tag; 4] {
        [Tag::Permutative, Tag::PermEquivalentDirectSum, Tag::HadamardBlock, Tag::Irreducible]
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification<F: Field> {
    NotOrthogonal,
    NotInSpan,
    Permutative(OpmWitness<F>),
    PermEquivalentDirectSum(CatalogEntry<F>),
    HadamardBlock(HadamardBlock<F>),
    Irreducible,
}

impl<F: Field> Classification<F> {
    pub fn tag(&self) -> Tag {
        match self {
            Classification::NotOrthogonal => Tag::NotOrthogonal,
            Classification::NotInSpan => Tag::NotInSpan,
            Classification::Permutative(_) => Tag::Permutative,
            Classification::PermEquivalentDirectSum(_) => Tag::PermEquivalentDirectSum,
            Classification::HadamardBlock(_) => Tag::HadamardBlock,
            Classification::Irreducible => Tag::Irreducible,
        }
    }

    /// The matrix rebuilt from the witness, for tags that carry one.
    pub fn reconstruct(&self) -> Option<Mat4<F>> {
        match self {
            Classification::Permutative(w) => Some(witness_matrix(w)),
            Classification::PermEquivalentDirectSum(c) => Some(c.reconstruct()),
            Classification::HadamardBlock(h) => Some(h.reconstruct()),
            _ => None,
        }
    }
}

/// Orthogonality, span membership, permutativity with a family witness, a
/// validated direct sum up to permutations, a Hadamard-conjugated block form,
/// in that order; the first match is reported.
pub fn classify_orthogonal<F: Field>(a: &Mat4<F>) -> Classification<F> {
    if !a.is_orthogonal() {
        return Classification::NotOrthogonal;
    }
    if in_perm_span(a).is_none() {
        return Classification::NotInSpan;
    }
    if a.is_permutative() {
        if let Some(w) = opm_witness(a) {
            return Classification::Permutative(w);
        }
    }
    if let Some(c) = direct_sum_catalog(a) {
        return Classification::PermEquivalentDirectSum(c);
    }
    if let Some(h) = hadamard_block_search(a) {
        return Classification::HadamardBlock(h);
    }
    Classification::Irreducible
}

/// Structural results about orthogonal matrices in sums of the `𝖫ₖ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateRule {
    /// A single `𝖫ₖ`: always an OPM.
    Single,
    /// `𝖫ᵢ ⊕ 𝖫ⱼ`: always an OPM.
    Pair,
    /// `𝖫₁ ⊕ 𝖫ᵢ ⊕ 𝖫ⱼ`, `{i,j} ∉ {{2,5},{3,4}}`: always an OPM.
    L1WithPair,
    /// `𝖫₁ ⊕ 𝖫₃ ⊕ 𝖫₄`: an OPM, or a direct sum up to permutations, possibly
    /// after conjugating by `H`.
    L1L3L4,
    /// `𝖫ᵢ ⊕ 𝖫ⱼ ⊕ 𝖫ₖ` with `i,j,k ∈ {2,3,4,5}`: always an OPM.
    TripleWithoutL1,
    /// `𝖫₂ ⊕ 𝖫₃ ⊕ 𝖫₄ ⊕ 𝖫₅`: always an OPM.
    L2L3L4L5,
}

impl GateRule {
    pub fn permitted(self) -> BTreeSet<Tag> {
        match self {
            GateRule::L1L3L4 => [Tag::Permutative, Tag::PermEquivalentDirectSum, Tag::HadamardBlock].into(),
            _ => [Tag::Permutative].into(),
        }
    }
}

/// Every covered space with the rule covering it.
pub fn covered_spaces() -> Vec<(GateRule, Subspaces)> {
    let mut out = Vec::new();
    for k in 1..=5u8 {
        out.push((GateRule::Single, Subspaces::of(&[k])));
    }
    for i in 1..=5u8 {
        for j in i + 1..=5 {
            out.push((GateRule::Pair, Subspaces::of(&[i, j])));
        }
    }
    for i in 2..=5u8 {
        for j in i + 1..=5 {
            if (i, j) != (2, 5) && (i, j) != (3, 4) {
                out.push((GateRule::L1WithPair, Subspaces::of(&[1, i, j])));
            }
        }
    }
    out.push((GateRule::L1L3L4, Subspaces::of(&[1, 3, 4])));
    for skip in (2..=5u8).rev() {
        let t: Vec<u8> = (2..=5).filter(|&k| k != skip).collect();
        out.push((GateRule::TripleWithoutL1, Subspaces::of(&t)));
    }
    out.push((GateRule::L2L3L4L5, Subspaces::of(&[2, 3, 4, 5])));
    out
}

/// Which rules apply to a matrix with the given minimal membership, and the
/// tags they leave open.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gate {
    pub membership: Subspaces,
    pub rules: Vec<(GateRule, Subspaces)>,
    pub permitted: BTreeSet<Tag>,
}

impl Gate {
    pub fn applies(&self) -> bool {
        !self.rules.is_empty()
    }

    pub fn allows(&self, t: Tag) -> bool {
        self.permitted.contains(&t)
    }
}

/// Gate for a membership: every covered space containing it applies, and
/// the permitted tags are those allowed by all of them.
pub fn theorem_gate_for(membership: Subspaces) -> Gate {
    let rules: Vec<_> = covered_spaces().into_iter().filter(|(_, s)| membership.is_subset(*s)).collect();
    let permitted = if rules.is_empty() {
        Tag::structural().into()
    } else {
        rules
            .iter()
            .map(|(r, _)| r.permitted())
            .reduce(|a, b| a.intersection(&b).copied().collect())
            .unwrap_or_default()
    };
    Gate { membership, rules, permitted }
}

/// Gate for an orthogonal matrix of the span; `None` outside the span.
pub fn theorem_gate<F: Field>(a: &Mat4<F>) -> Option<Gate> {
    in_perm_span(a).map(|c| theorem_gate_for(membership_of(&c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::tests::conclusion_m;
    use crate::families::{c_set_element, grover, CSet, FamilyWitness, Sign};
    use crate::mat::qmat;
    use crate::perm::{p4, Perm4};
    use crate::scalar::{q, Q};

    #[test]
    fn grover_is_permutative_on_the_x_family() {
        let c = classify_orthogonal(&grover::<Q>());
        let Classification::Permutative(OpmWitness::Family(FamilyWitness { fid, pbar, .. })) = &c else {
            panic!("{c:?}")
        };
        assert_eq!((fid.to_string(), *pbar), ("X1".to_string(), p4("(34)")));
        assert_eq!(c.reconstruct().unwrap(), grover());
    }

    #[test]
    fn conclusion_matrix_is_irreducible() {
        let m = conclusion_m();
        assert_eq!(classify_orthogonal(&m), Classification::Irreducible);
        let g = theorem_gate(&m).unwrap();
        assert_eq!(g.membership, Subspaces::of(&[1, 2, 5]));
        assert!(!g.applies());
        assert_eq!(g.permitted, Tag::structural().into());
    }

    #[test]
    fn c_set_origin_points() {
        // c₂ = 0 on the + branch of 𝒞₁ is a permutative matrix, which takes priority.
        let m = c_set_element::<Q>(CSet::C1, &q(0, 1), Sign::Plus).unwrap();
        let h = hadamard_block_search(&m).unwrap();
        assert_eq!(h.block, crate::mat::Mat3::<Q>::identity().scale(&q(-1, 1)));
        assert_eq!(classify_orthogonal(&m).tag(), Tag::Permutative);
        let m = c_set_element::<Q>(CSet::C1, &CSet::C1.rational_c2(&q(2, 1)), Sign::Plus).unwrap();
        let c = classify_orthogonal(&m);
        assert_eq!(c.tag(), Tag::HadamardBlock, "{m}");
        assert_eq!(c.reconstruct().unwrap(), m);
    }

    #[test]
    fn other_tags() {
        assert_eq!(classify_orthogonal(&Mat4::<Q>::all_ones()), Classification::NotOrthogonal);
        let r = qmat([[3, 4, 0, 0], [-4, 3, 0, 0], [0, 0, 5, 0], [0, 0, 0, 5]], 5);
        assert_eq!(classify_orthogonal(&r), Classification::NotInSpan);
        let a = qmat([[3, 0, 0, 0], [0, -1, 2, 2], [0, 2, -1, 2], [0, 2, 2, -1]], 3);
        let c = classify_orthogonal(&a);
        assert_eq!(c.tag(), Tag::PermEquivalentDirectSum);
        assert_eq!(c.reconstruct().unwrap(), a);
    }

    #[test]
    fn gate_examples() {
        assert_eq!(theorem_gate_for(Subspaces::of(&[1, 2])).permitted, [Tag::Permutative].into());
        assert_eq!(
            theorem_gate_for(Subspaces::of(&[1, 3, 4])).permitted,
            [Tag::Permutative, Tag::PermEquivalentDirectSum, Tag::HadamardBlock].into()
        );
        assert_eq!(theorem_gate_for(Subspaces::of(&[1, 3])).permitted, [Tag::Permutative].into());
        assert!(!theorem_gate_for(Subspaces::of(&[1, 2, 5])).applies());
        assert!(!theorem_gate_for(Subspaces::of(&[1, 2, 3, 4])).applies());
        assert_eq!(theorem_gate_for(Subspaces::of(&[3, 4, 5])).permitted, [Tag::Permutative].into());
        let covered = covered_spaces();
        assert_eq!(covered.len(), 5 + 10 + 4 + 1 + 4 + 1);
    }

    #[test]
    fn equivariant_tags() {
        let samples = [grover::<Q>(), conclusion_m(), qmat([[3, 0, 0, 0], [0, -1, 2, 2], [0, 2, -1, 2], [0, 2, 2, -1]], 3)];
        let perms = Perm4::all();
        for a in &samples {
            let t = classify_orthogonal(a).tag();
            for (x, y) in [(perms[3], perms[17]), (perms[22], perms[9])] {
                assert_eq!(classify_orthogonal(&a.permuted(&x, &y)).tag(), t);
            }
        }
    }
}
