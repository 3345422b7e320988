//! Block structure up to row and column permutations.

use once_cell::sync::Lazy;

use crate::families::{c_bar_membership, opm3_membership, CSet, Opm3Set};
use crate::mat::{Mat, Mat2, Mat3, Mat4};
use crate::perm::Perm4;
use crate::scalar::{Field, Q};

/// `X·A·Y` is block diagonal with the given block sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSumForm {
    pub x: Perm4,
    pub y: Perm4,
    pub sizes: Vec<usize>,
}

fn zero_outside<F: Field>(a: &Mat4<F>, x: &Perm4, yi: &Perm4, blocks: &[std::ops::Range<usize>]) -> bool {
    let tol = a.tol();
    let block_of = |k: usize| blocks.iter().position(|r| r.contains(&k));
    (0..4).all(|i| (0..4).all(|j| block_of(i) == block_of(j) || a.permuted_entry(x, yi, i, j).near_zero(tol)))
}

fn search<F: Field>(a: &Mat4<F>, blocks: &[std::ops::Range<usize>]) -> Vec<(Perm4, Perm4)> {
    let perms = Perm4::all();
    let mut hits = Vec::new();
    for x in &perms {
        for y in &perms {
            if zero_outside(a, x, &y.inverse(), blocks) {
                hits.push((*x, *y));
            }
        }
    }
    hits
}

fn one_three<F: Field>(a: &Mat4<F>) -> Vec<(Perm4, Perm4)> {
    search(a, &[0..1, 1..4])
}

fn two_two<F: Field>(a: &Mat4<F>) -> Vec<(Perm4, Perm4)> {
    search(a, &[0..2, 2..4])
}

/// First `(X, Y)` in lexicographic order making `X·A·Y` block diagonal,
/// trying sizes `(1,3)` before `(2,2)`.
pub fn find_direct_sum_form<F: Field>(a: &Mat4<F>) -> Option<DirectSumForm> {
    if let Some(&(x, y)) = one_three(a).first() {
        return Some(DirectSumForm { x, y, sizes: vec![1, 3] });
    }
    two_two(a).first().map(|&(x, y)| DirectSumForm { x, y, sizes: vec![2, 2] })
}

/// Summands of a validated direct sum.
#[derive(Clone, Debug, PartialEq)]
pub enum Summands<F: Field> {
    /// `X·A·Y = corner ⊕ block` with every order-3 set containing `block`.
    ScalarOpm3 { corner: F, block: Mat3<F>, sets: Vec<(Opm3Set, F, F)> },
    /// `X·A·Y = upper ⊕ lower`, and `a = sign·P_perm`.
    Permutation { upper: Mat2<F>, lower: Mat2<F>, sign: F, perm: Perm4 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry<F: Field> {
    pub x: Perm4,
    pub y: Perm4,
    pub summands: Summands<F>,
}

impl<F: Field> CatalogEntry<F> {
    /// The block diagonal matrix `X·A·Y`.
    pub fn reduced(&self) -> Mat4<F> {
        match &self.summands {
            Summands::ScalarOpm3 { corner, block, .. } => Mat4::direct_sum(corner.clone(), block),
            Summands::Permutation { upper, lower, .. } => {
                let z = Mat2::zero();
                Mat4::from_blocks(upper, &z, &z, lower)
            }
        }
    }

    /// `A = Xᵀ·(X·A·Y)·Yᵀ`.
    pub fn reconstruct(&self) -> Mat4<F> {
        self.reduced().permuted(&self.x.inverse(), &self.y.inverse())
    }
}

/// `a = ±P_τ`, if so.
pub fn signed_permutation<F: Field>(a: &Mat4<F>) -> Option<(F, Perm4)> {
    let tol = a.tol();
    let mut image = [0u8; 4];
    let mut sign: Option<F> = None;
    for i in 0..4 {
        let nz: Vec<usize> = (0..4).filter(|&j| !a[(i, j)].near_zero(tol)).collect();
        let [j] = nz[..] else { return None };
        let v = a[(i, j)].clone();
        let s = if v.near(&F::one(), tol) {
            F::one()
        } else if v.near(&-F::one(), tol) {
            -F::one()
        } else {
            return None;
        };
        match &sign {
            Some(prev) if !prev.near(&s, 0.0) => return None,
            _ => sign = Some(s),
        }
        image[i] = j as u8 + 1;
    }
    let p = Perm4::from_image(image).ok()?;
    Some((sign?, p))
}

/// Direct sum decomposition with each summand checked against the order-3
/// sets (`±1 ⊕ B`) or reduced to a signed permutation (`2 ⊕ 2`).
pub fn direct_sum_catalog<F: Field>(a: &Mat4<F>) -> Option<CatalogEntry<F>> {
    if let Some((sign, perm)) = signed_permutation(a) {
        let &(x, y) = two_two(a).first()?;
        let r = a.permuted(&x, &y);
        let upper = Mat::from_fn(|i, j| r[(i, j)].clone()).with_tol(a.tol());
        let lower = Mat::from_fn(|i, j| r[(i + 2, j + 2)].clone()).with_tol(a.tol());
        return Some(CatalogEntry { x, y, summands: Summands::Permutation { upper, lower, sign, perm } });
    }
    let tol = a.tol();
    for (x, y) in one_three(a) {
        let r = a.permuted(&x, &y);
        let corner = r[(0, 0)].clone();
        let line = if corner.near(&F::one(), tol) {
            1
        } else if corner.near(&-F::one(), tol) {
            -1
        } else {
            continue;
        };
        let block = r.trailing_block();
        let sets: Vec<_> = opm3_membership(&block).into_iter().filter(|(s, _, _)| s.line_sum() == line).collect();
        if !sets.is_empty() {
            return Some(CatalogEntry { x, y, summands: Summands::ScalarOpm3 { corner, block, sets } });
        }
    }
    None
}

/// `H·P_σ·H = 1 ⊕ S` with `S` a signed `3×3` permutation: row `i` of `S`
/// has its nonzero `signs[i]` in column `cols[i]`.
#[derive(Clone, Copy, Debug)]
struct SignedPerm3 {
    cols: [usize; 3],
    signs: [i8; 3],
}

static HADAMARD_IMAGES: Lazy<Vec<(Perm4, SignedPerm3)>> = Lazy::new(|| {
    Perm4::all()
        .into_iter()
        .map(|p| {
            let m = p.to_matrix::<Q>().conjugate_hadamard();
            let b = m.trailing_block();
            let mut cols = [0; 3];
            let mut signs = [0; 3];
            for i in 0..3 {
                let j = (0..3).find(|&j| b[(i, j)] != Q::from_i64(0)).expect("monomial");
                cols[i] = j;
                signs[i] = if b[(i, j)].is_negative() { -1 } else { 1 };
            }
            (p, SignedPerm3 { cols, signs })
        })
        .collect()
});

/// Witness that `H(X·A·Y)H = corner ⊕ block` with `block` an order-3 OPM.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardBlock<F: Field> {
    pub x: Perm4,
    pub y: Perm4,
    pub corner: F,
    pub block: Mat3<F>,
    pub sets: Vec<(Opm3Set, F, F)>,
    /// `(set, a₄, c₂)` when the block lies in one of the `𝒞̄` sets.
    pub c_bar: Option<(CSet, F, F)>,
}

impl<F: Field> HadamardBlock<F> {
    /// `A = Xᵀ·H(corner ⊕ block)H·Yᵀ`.
    pub fn reconstruct(&self) -> Mat4<F> {
        Mat4::direct_sum(self.corner.clone(), &self.block)
            .conjugate_hadamard()
            .permuted(&self.x.inverse(), &self.y.inverse())
    }
}

fn signed_sandwich<F: Field>(sx: &SignedPerm3, b: &Mat3<F>, sy: &SignedPerm3) -> Mat3<F> {
    // (S_X B S_Y)(i,j) = sx_i · B(cx_i, k) · S_Y(k, j), where k is the row of S_Y with column j.
    let mut row_of_col = [0usize; 3];
    for k in 0..3 {
        row_of_col[sy.cols[k]] = k;
    }
    Mat::from_fn(|i, j| {
        let k = row_of_col[j];
        let v = b[(sx.cols[i], k)].clone();
        if sx.signs[i] * sy.signs[k] < 0 {
            -v
        } else {
            v
        }
    })
    .with_tol(b.tol())
}

/// Lexicographically first `(X, Y)` for which `H(X·A·Y)H = ±1 ⊕ B` with `B`
/// an order-3 OPM.
pub fn hadamard_block_search<F: Field>(a: &Mat4<F>) -> Option<HadamardBlock<F>> {
    let tol = a.tol();
    let h = a.conjugate_hadamard();
    let off_corner_zero = (1..4).all(|k| h[(0, k)].near_zero(tol) && h[(k, 0)].near_zero(tol));
    if !off_corner_zero {
        return None;
    }
    let corner = h[(0, 0)].clone();
    if !corner.near(&F::one(), tol) && !corner.near(&-F::one(), tol) {
        return None;
    }
    let inner = h.trailing_block();
    for (x, sx) in HADAMARD_IMAGES.iter() {
        for (y, sy) in HADAMARD_IMAGES.iter() {
            let block = signed_sandwich(sx, &inner, sy);
            if block.common_line_sum().is_none() {
                continue;
            }
            let sets = opm3_membership(&block);
            if sets.is_empty() {
                continue;
            }
            let c_bar = [CSet::C1, CSet::C2]
                .into_iter()
                .find_map(|c| c_bar_membership(c, &block).map(|(a4, c2)| (c, a4, c2)));
            return Some(HadamardBlock { x: *x, y: *y, corner, block, sets, c_bar });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{c_set_element, grover, Sign};
    use crate::mat::qmat;
    use crate::perm::p4;
    use crate::scalar::q;

    #[test]
    fn hadamard_images_are_signed_permutations() {
        for (p, s) in HADAMARD_IMAGES.iter() {
            let m = p.to_matrix::<Q>().conjugate_hadamard();
            assert_eq!(m[(0, 0)], q(1, 1));
            let mut cols = s.cols;
            cols.sort();
            assert_eq!(cols, [0, 1, 2]);
        }
    }

    #[test]
    fn sandwich_matches_matrix_product() {
        let a = crate::decompose::tests::conclusion_m();
        let h = a.conjugate_hadamard().trailing_block();
        for (x, sx) in HADAMARD_IMAGES.iter().step_by(5) {
            for (y, sy) in HADAMARD_IMAGES.iter().step_by(7) {
                let full = a.permuted(x, y).conjugate_hadamard().trailing_block();
                assert_eq!(signed_sandwich(sx, &h, sy), full);
            }
        }
    }

    #[test]
    fn two_thirds_j_minus_identity_block() {
        let a = qmat([[3, 0, 0, 0], [0, -1, 2, 2], [0, 2, -1, 2], [0, 2, 2, -1]], 3);
        let f = find_direct_sum_form(&a).unwrap();
        assert_eq!((f.x, f.y, f.sizes.clone()), (Perm4::identity(), Perm4::identity(), vec![1, 3]));
        let c = direct_sum_catalog(&a).unwrap();
        let Summands::ScalarOpm3 { corner, sets, .. } = &c.summands else { panic!() };
        assert_eq!(*corner, q(1, 1));
        assert!(sets.contains(&(Opm3Set::XBar1, q(-1, 3), q(2, 3))));
        assert_eq!(c.reconstruct(), a);
    }

    #[test]
    fn minus_identity_and_permutations() {
        let m = Mat4::<Q>::identity().scale(&q(-1, 1));
        let c = direct_sum_catalog(&m).unwrap();
        let Summands::Permutation { sign, perm, .. } = &c.summands else { panic!() };
        assert_eq!((sign.clone(), *perm), (q(-1, 1), Perm4::identity()));
        // The order-3 reading of −I₄ also exists.
        let b = Mat3::<Q>::identity().scale(&q(-1, 1));
        assert!(opm3_membership(&b).contains(&(Opm3Set::YBarM1, q(-1, 1), q(0, 1))));

        let p = p4("(12)").to_matrix::<Q>();
        let c = direct_sum_catalog(&p).unwrap();
        assert!(matches!(c.summands, Summands::Permutation { .. }));
        assert_eq!(c.reconstruct(), p);
    }

    #[test]
    fn dense_matrices_have_no_direct_sum() {
        assert!(find_direct_sum_form(&grover::<Q>()).is_none());
        assert!(find_direct_sum_form(&crate::decompose::tests::conclusion_m()).is_none());
    }

    #[test]
    fn equivariance_of_search() {
        let a = qmat([[3, 0, 0, 0], [0, -1, 2, 2], [0, 2, -1, 2], [0, 2, 2, -1]], 3);
        for (x, y) in [(p4("(1234)"), p4("(13)")), (p4("(24)"), p4("(142)"))] {
            let b = a.permuted(&x, &y);
            let c = direct_sum_catalog(&b).unwrap();
            assert_eq!(c.reconstruct(), b);
        }
    }

    #[test]
    fn c_set_elements_have_hadamard_blocks() {
        for (which, c2) in [(CSet::C1, q(0, 1)), (CSet::C1, q(-1, 3)), (CSet::C2, q(0, 1)), (CSet::C2, q(3, 5))] {
            for branch in [Sign::Plus, Sign::Minus] {
                let Ok(m) = c_set_element::<Q>(which, &c2, branch) else { continue };
                let w = hadamard_block_search(&m).unwrap();
                assert_eq!(w.reconstruct(), m);
            }
        }
        assert!(hadamard_block_search(&crate::decompose::tests::conclusion_m()).is_none());
    }
}
