//! Dense `N×N` matrices over a [`Field`] backend.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::perm::Perm;
use crate::scalar::{Field, DEFAULT_TOL, Q};

/// Square matrix with a uniform backend.
///
/// `tol` is the comparison tolerance used by predicates; it is always 0 for
/// the exact backend.
#[derive(Clone)]
pub struct Mat<F, const N: usize> {
    entries: [[F; N]; N],
    tol: f64,
}

pub type Mat4<F> = Mat<F, 4>;
pub type Mat3<F> = Mat<F, 3>;
pub type Mat2<F> = Mat<F, 2>;

fn default_tol<F: Field>() -> f64 {
    if F::EXACT {
        0.0
    } else {
        DEFAULT_TOL
    }
}

impl<F: Field, const N: usize> Mat<F, N> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> F) -> Self {
        Mat { entries: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))), tol: default_tol::<F>() }
    }

    pub fn from_rows(entries: [[F; N]; N]) -> Self {
        Mat { entries, tol: default_tol::<F>() }
    }

    /// Rows of small integers over a common denominator.
    pub fn from_ints(rows: [[i64; N]; N], den: i64) -> Self {
        Self::from_fn(|i, j| F::ratio(rows[i][j], den))
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| F::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn all_ones() -> Self {
        Self::from_fn(|_, _| F::one())
    }

    pub fn diag(d: [F; N]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i].clone() } else { F::zero() })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Set the comparison tolerance. Ignored (kept at 0) for exact matrices.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = if F::EXACT { 0.0 } else { tol.max(0.0) };
        self
    }

    pub fn rows(&self) -> &[[F; N]; N] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[F; N] {
        &self.entries[i]
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Mat<G, N> {
        let m = Mat::from_fn(|i, j| f(&self.entries[i][j]));
        if G::EXACT {
            m
        } else {
            m.with_tol(self.tol.max(DEFAULT_TOL))
        }
    }

    pub fn to_f64(&self) -> Mat<f64, N> {
        self.map(|v| v.to_f64())
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(|i, j| self.entries[j][i].clone()).with_tol(self.tol)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Mat::from_fn(|i, j| {
            let mut acc = F::zero();
            for k in 0..N {
                acc = acc + self.entries[i][k].clone() * other.entries[k][j].clone();
            }
            acc
        })
        .with_tol(self.tol.max(other.tol))
    }

    pub fn scale(&self, c: &F) -> Self {
        Mat::from_fn(|i, j| c.clone() * self.entries[i][j].clone()).with_tol(self.tol)
    }

    /// Largest entrywise distance, as binary64.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                let d = (self.entries[i][j].clone() - other.entries[i][j].clone()).to_f64().abs();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Entrywise equality within the larger of the two tolerances.
    pub fn near(&self, other: &Self) -> bool {
        let tol = self.tol.max(other.tol);
        (0..N).all(|i| (0..N).all(|j| self.entries[i][j].near(&other.entries[i][j], tol)))
    }

    /// `max |AᵀA − I|` entrywise.
    pub fn orthogonality_residual(&self) -> f64 {
        let g = self.transpose().matmul(self);
        g.max_abs_diff(&Mat::identity())
    }

    /// `AᵀA = I` within `tol` (exactly for rationals).
    pub fn is_orthogonal(&self) -> bool {
        let g = self.transpose().matmul(self);
        g.near(&Mat::identity().with_tol(self.tol))
    }

    /// Every row is a rearrangement of the first row.
    pub fn is_permutative(&self) -> bool {
        let sorted: Vec<Vec<F>> = (0..N)
            .map(|i| {
                let mut r = self.entries[i].to_vec();
                r.sort_by(|a, b| a.total_cmp(b));
                r
            })
            .collect();
        sorted
            .windows(2)
            .all(|w| w[0].iter().zip(w[1].iter()).all(|(a, b)| a.near(b, self.tol)))
    }

    pub fn row_sums(&self) -> [F; N] {
        std::array::from_fn(|i| self.entries[i].iter().cloned().fold(F::zero(), |a, b| a + b))
    }

    pub fn col_sums(&self) -> [F; N] {
        std::array::from_fn(|j| (0..N).map(|i| self.entries[i][j].clone()).fold(F::zero(), |a, b| a + b))
    }

    pub fn row_col_sums(&self) -> ([F; N], [F; N]) {
        (self.row_sums(), self.col_sums())
    }

    /// All row and column sums equal one common value, which is returned.
    pub fn common_line_sum(&self) -> Option<F> {
        let (r, c) = self.row_col_sums();
        let s = r[0].clone();
        (r.iter().chain(c.iter()).all(|v| v.near(&s, self.tol))).then_some(s)
    }

    /// Determinant by cofactor expansion (division free, exact on rationals).
    pub fn det(&self) -> F {
        let idx: Vec<usize> = (0..N).collect();
        det_minor(&self.entries, 0, &idx)
    }

    /// `P_p · A`: row `i` of the result is row `p(i)` of `A`.
    pub fn permute_rows(&self, p: &Perm<N>) -> Self {
        Mat::from_fn(|i, j| self.entries[p.apply(i)][j].clone()).with_tol(self.tol)
    }

    /// `A · P_q`: column `q(j)` of the result is column `j` of `A`.
    pub fn permute_cols(&self, q: &Perm<N>) -> Self {
        let qi = q.inverse();
        Mat::from_fn(|i, j| self.entries[i][qi.apply(j)].clone()).with_tol(self.tol)
    }

    /// `P_x · A · P_y`.
    pub fn permuted(&self, x: &Perm<N>, y: &Perm<N>) -> Self {
        let yi = y.inverse();
        Mat::from_fn(|i, j| self.entries[x.apply(i)][yi.apply(j)].clone()).with_tol(self.tol)
    }

    /// `(P_x A P_y)(i, j)` without building the matrix.
    #[inline]
    pub fn permuted_entry(&self, x: &Perm<N>, y_inv: &Perm<N>, i: usize, j: usize) -> &F {
        &self.entries[x.apply(i)][y_inv.apply(j)]
    }
}

fn det_minor<F: Field, const N: usize>(a: &[[F; N]; N], row: usize, cols: &[usize]) -> F {
    if cols.len() == 1 {
        return a[row][cols[0]].clone();
    }
    let mut acc = F::zero();
    for (k, &c) in cols.iter().enumerate() {
        if a[row][c].near_zero(0.0) {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = a[row][c].clone() * det_minor(a, row + 1, &rest);
        acc = if k % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

impl<F: Field> Mat<F, 4> {
    /// The symmetric Hadamard matrix `½[[1,1,1,1],[1,−1,1,−1],[1,1,−1,−1],[1,−1,−1,1]]`.
    pub fn hadamard() -> Self {
        Mat::from_ints([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], 2)
    }

    /// `H · A · H`.
    pub fn conjugate_hadamard(&self) -> Self {
        let h = Mat::hadamard();
        h.matmul(self).matmul(&h).with_tol(self.tol)
    }

    /// Lower-right `3×3` block.
    pub fn trailing_block(&self) -> Mat<F, 3> {
        Mat::from_fn(|i, j| self.entries[i + 1][j + 1].clone()).with_tol(self.tol)
    }

    /// `s ⊕ B`.
    pub fn direct_sum(s: F, b: &Mat<F, 3>) -> Self {
        Mat::from_fn(|i, j| match (i, j) {
            (0, 0) => s.clone(),
            (0, _) | (_, 0) => F::zero(),
            _ => b[(i - 1, j - 1)].clone(),
        })
        .with_tol(b.tol)
    }

    /// Block matrix `[[a, b], [c, d]]` from `2×2` blocks.
    pub fn from_blocks(a: &Mat<F, 2>, b: &Mat<F, 2>, c: &Mat<F, 2>, d: &Mat<F, 2>) -> Self {
        Mat::from_fn(|i, j| {
            let blk = match (i < 2, j < 2) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk[(i % 2, j % 2)].clone()
        })
    }

    /// Row-major 16-vector.
    pub fn to_vec16(&self) -> [F; 16] {
        std::array::from_fn(|k| self.entries[k / 4][k % 4].clone())
    }
}

impl<F: Field, const N: usize> Index<(usize, usize)> for Mat<F, N> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.entries[i][j]
    }
}

impl<F: Field, const N: usize> IndexMut<(usize, usize)> for Mat<F, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.entries[i][j]
    }
}

impl<F: Field, const N: usize> PartialEq for Mat<F, N> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<F: Field, const N: usize> Add for Mat<F, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let tol = self.tol.max(rhs.tol);
        Mat::from_fn(|i, j| self.entries[i][j].clone() + rhs.entries[i][j].clone()).with_tol(tol)
    }
}

impl<F: Field, const N: usize> Sub for Mat<F, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let tol = self.tol.max(rhs.tol);
        Mat::from_fn(|i, j| self.entries[i][j].clone() - rhs.entries[i][j].clone()).with_tol(tol)
    }
}

impl<F: Field, const N: usize> Neg for Mat<F, N> {
    type Output = Self;
    fn neg(self) -> Self {
        let tol = self.tol;
        Mat::from_fn(|i, j| -self.entries[i][j].clone()).with_tol(tol)
    }
}

impl<F: Field, const N: usize> Mul for &Mat<F, N> {
    type Output = Mat<F, N>;
    fn mul(self, rhs: Self) -> Mat<F, N> {
        self.matmul(rhs)
    }
}

impl<F: Field, const N: usize> fmt::Debug for Mat<F, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
        }
        write!(f, "]")
    }
}

impl<F: Field, const N: usize> fmt::Display for Mat<F, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

/// Exact `n/d` matrix from integer rows; convenience for fixtures.
pub fn qmat<const N: usize>(rows: [[i64; N]; N], den: i64) -> Mat<Q, N> {
    Mat::from_ints(rows, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::p4;

    fn grover_q() -> Mat4<Q> {
        qmat([[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]], 2)
    }

    #[test]
    fn ring_identities() {
        let a = qmat([[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]], 3);
        assert_eq!(Mat::identity().matmul(&a), a);
        let s = p4("(12)").to_matrix::<Q>();
        assert_eq!(s.matmul(&s), Mat::identity());
        let h = Mat4::<Q>::hadamard();
        assert_eq!(h.matmul(&h), Mat::identity());
    }

    #[test]
    fn orthogonality() {
        assert!(grover_q().is_orthogonal());
        assert!(!Mat4::<Q>::all_ones().is_orthogonal());
        let a = qmat([[2, -2, 4, 1], [-2, 2, 1, 4], [4, 1, -2, 2], [1, 4, 2, -2]], 5);
        assert!(a.is_orthogonal());
        assert_eq!(a.orthogonality_residual(), 0.0);
    }

    #[test]
    fn permutative() {
        assert!(grover_q().is_permutative());
        let third = qmat([[3, 0, 0, 0], [0, -1, 2, 2], [0, 2, -1, 2], [0, 2, 2, -1]], 3);
        assert!(!third.is_permutative());
        for p in crate::perm::Perm4::all() {
            assert!(p.to_matrix::<Q>().is_permutative());
        }
    }

    #[test]
    fn approx_permutative_uses_tolerance() {
        let g = grover_q().to_f64();
        let mut nudged = g.clone();
        nudged[(2, 1)] += 1e-12;
        assert!(nudged.is_permutative());
        nudged[(2, 1)] += 1e-6;
        assert!(!nudged.is_permutative());
    }

    #[test]
    fn line_sums() {
        let (r, c) = grover_q().row_col_sums();
        assert!(r.iter().chain(c.iter()).all(|v| *v == Q::one()));
        let (r, c) = (-Mat4::<Q>::identity()).row_col_sums();
        assert!(r.iter().chain(c.iter()).all(|v| *v == -Q::one()));
    }

    #[test]
    fn hadamard_conjugation() {
        let hgh = grover_q().conjugate_hadamard();
        assert_eq!(hgh, Mat::diag([Q::one(), -Q::one(), -Q::one(), -Q::one()]));
        assert_eq!(Mat4::<Q>::identity().conjugate_hadamard(), Mat::identity());
        let a = qmat([[2, -2, 4, 1], [-2, 2, 1, 4], [4, 1, -2, 2], [1, 4, 2, -2]], 5);
        assert_eq!(a.conjugate_hadamard().conjugate_hadamard(), a);
    }

    #[test]
    fn determinant() {
        assert_eq!(grover_q().det(), -Q::one());
        assert_eq!(p4("(12)").to_matrix::<Q>().det(), -Q::one());
        assert_eq!(p4("(123)").to_matrix::<Q>().det(), Q::one());
        let a = qmat([[2, -2, 4, 1], [-2, 2, 1, 4], [4, 1, -2, 2], [1, 4, 2, -2]], 5);
        assert_eq!(a.det(), Q::one());
    }

    #[test]
    fn permuting_matches_products() {
        let a = qmat([[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]], 1);
        for x in crate::perm::Perm4::all().iter().step_by(5) {
            for y in crate::perm::Perm4::all().iter().step_by(7) {
                let direct = x.to_matrix::<Q>().matmul(&a).matmul(&y.to_matrix());
                assert_eq!(a.permuted(x, y), direct);
                assert_eq!(a.permute_rows(x), x.to_matrix::<Q>().matmul(&a));
                assert_eq!(a.permute_cols(y), a.matmul(&y.to_matrix()));
            }
        }
    }

    #[test]
    fn approx_tolerance_propagates() {
        let a = Mat4::<f64>::identity().with_tol(1e-6);
        let b = Mat4::<f64>::identity();
        assert_eq!(a.matmul(&b).tol(), 1e-6);
        assert_eq!(Mat4::<Q>::identity().with_tol(1e-3).tol(), 0.0);
    }
}
