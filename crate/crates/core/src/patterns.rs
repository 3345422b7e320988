//! Zero/nonzero patterns and the combinatorial orthogonality tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Field;

/// A square (0,1) matrix.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern<const N: usize> {
    bits: [[bool; N]; N],
}

pub type Pattern4 = Pattern<4>;

impl<const N: usize> Pattern<N> {
    pub fn from_bits(bits: [[bool; N]; N]) -> Self {
        Pattern { bits }
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> bool) -> Self {
        Pattern { bits: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    pub fn all_ones() -> Self {
        Self::from_fn(|_, _| true)
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| i == j)
    }

    /// Pattern whose row-major bits are the low `N*N` bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        Self::from_fn(|i, j| (mask >> (i * N + j)) & 1 == 1)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i][j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.bits[j][i])
    }

    pub fn permute_rows(&self, image: &[usize; N]) -> Self {
        Self::from_fn(|i, j| self.bits[image[i]][j])
    }

    pub fn permute_cols(&self, image: &[usize; N]) -> Self {
        Self::from_fn(|i, j| self.bits[i][image[j]])
    }

    fn row_dot(&self, a: usize, b: usize) -> usize {
        (0..N).filter(|&k| self.bits[a][k] && self.bits[b][k]).count()
    }

    fn rows_quadrangular(&self) -> bool {
        (0..N).all(|a| (a + 1..N).all(|b| self.row_dot(a, b) != 1))
    }

    /// Every subset `S` of rows in which each row meets another row of `S`
    /// spans at least `|S|` columns holding two or more ones.
    fn rows_strongly_quadrangular(&self) -> bool {
        for mask in 1u32..(1 << N) {
            let rows: Vec<usize> = (0..N).filter(|&r| mask >> r & 1 == 1).collect();
            if rows.len() < 2 {
                continue;
            }
            let linked = rows
                .iter()
                .all(|&a| rows.iter().any(|&b| b != a && self.row_dot(a, b) > 0));
            if !linked {
                continue;
            }
            let heavy = (0..N)
                .filter(|&c| rows.iter().filter(|&&r| self.bits[r][c]).count() >= 2)
                .count();
            if heavy < rows.len() {
                return false;
            }
        }
        true
    }

    /// No two distinct rows and no two distinct columns share exactly one 1.
    pub fn is_quadrangular(&self) -> bool {
        self.rows_quadrangular() && self.transpose().rows_quadrangular()
    }

    /// Row and column strongly quadrangular, checking every qualifying subset.
    pub fn is_strongly_quadrangular(&self) -> bool {
        self.rows_strongly_quadrangular() && self.transpose().rows_strongly_quadrangular()
    }

    /// Whether some unitary matrix has exactly this support.
    ///
    /// Decided by strong quadrangularity, which characterizes unitary support
    /// up to order 4. Larger orders are rejected.
    pub fn supports_unitary_small(&self) -> Result<bool> {
        if N > 4 {
            return Err(Error::OutOfRange(format!("order {N} exceeds 4")));
        }
        Ok(self.is_strongly_quadrangular())
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.bits
            .iter()
            .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn parse_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        if rows.len() != N {
            return Err(Error::Parse(format!("expected {N} rows, got {}", rows.len())));
        }
        let mut bits = [[false; N]; N];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref().trim();
            if row.chars().count() != N {
                return Err(Error::Parse(format!("row {:?} does not have {N} entries", row)));
            }
            for (j, ch) in row.chars().enumerate() {
                bits[i][j] = match ch {
                    '0' => false,
                    '1' => true,
                    _ => return Err(Error::Parse(format!("bad pattern digit {ch:?}"))),
                };
            }
        }
        Ok(Pattern { bits })
    }
}

/// Support of a matrix: bit set where the entry exceeds the matrix tolerance.
pub fn pattern_of<F: Field, const N: usize>(a: &Mat<F, N>) -> Pattern<N> {
    Pattern::from_fn(|i, j| !a[(i, j)].near_zero(a.tol()))
}

impl<const N: usize> fmt::Display for Pattern<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.row_strings().join(","))
    }
}

impl<const N: usize> fmt::Debug for Pattern<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

impl<const N: usize> FromStr for Pattern<N> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.split(',').collect();
        Self::parse_rows(&rows)
    }
}

impl<const N: usize> Serialize for Pattern<N> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_strings().serialize(s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for Pattern<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        Self::parse_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::qmat;
    use crate::perm::Perm4;
    use crate::scalar::Q;

    fn pat(s: &str) -> Pattern4 {
        s.parse().unwrap()
    }

    #[test]
    fn fixtures() {
        let m = pat("1100,1011,0011,1110");
        assert!(!m.is_quadrangular());
        assert!(!m.supports_unitary_small().unwrap());
        assert!(Pattern4::identity().is_quadrangular());
        assert!(Pattern4::identity().is_strongly_quadrangular());
        assert!(Pattern4::all_ones().is_quadrangular());
        assert!(Pattern4::all_ones().is_strongly_quadrangular());
        let m2 = pat("1100,0011,1111,1101");
        assert!(!m2.is_quadrangular());
        assert!(!m2.is_strongly_quadrangular());
    }

    #[test]
    fn quadrangular_but_not_strongly() {
        // Three rows pairwise meeting in two columns, yet only two heavy columns.
        let m = pat("1100,1100,1100,0000");
        assert!(m.is_quadrangular());
        assert!(!m.is_strongly_quadrangular());
    }

    #[test]
    fn patterns_of_matrices() {
        let g = qmat([[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]], 2);
        assert_eq!(pattern_of(&g), Pattern4::all_ones());
        assert!(pattern_of(&g).is_strongly_quadrangular());
        for p in Perm4::all() {
            let m = p.to_matrix::<Q>();
            assert_eq!(pattern_of(&m), Pattern::from_fn(|i, j| p.apply(i) == j));
        }
    }

    #[test]
    fn text_round_trip() {
        let m = pat("1100,1011,0011,1110");
        assert_eq!(m.to_string(), "1100,1011,0011,1110");
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, r#"["1100","1011","0011","1110"]"#);
        assert_eq!(serde_json::from_str::<Pattern4>(&js).unwrap(), m);
        assert!("110,1011,0011,1110".parse::<Pattern4>().is_err());
        assert!("1100,1011,0011".parse::<Pattern4>().is_err());
        assert!("1102,1011,0011,1110".parse::<Pattern4>().is_err());
    }

    #[test]
    fn order_limit() {
        assert!(Pattern::<5>::all_ones().supports_unitary_small().is_err());
        assert!(Pattern::<3>::all_ones().supports_unitary_small().unwrap());
    }

    #[test]
    fn full_sweep_strong_implies_quadrangular() {
        let mut strong = 0;
        for mask in 0u64..(1 << 16) {
            let m = Pattern4::from_mask(mask);
            if m.is_strongly_quadrangular() {
                strong += 1;
                assert!(m.is_quadrangular(), "{m}");
            }
        }
        assert!(strong > 0);
    }
}
