//! Permutations of small order and their matrices.
//!
//! Convention: the permutation matrix of `σ` has a 1 in entry `(i, j)` exactly
//! when `σ(i) = j`. With that convention `P_σ P_τ` is the matrix of
//! `i ↦ τ(σ(i))`, which is what [`Perm::compose`] returns, so matrix products
//! and compositions line up without transposes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Field;

/// A permutation of `{1, …, N}`, stored 0-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm<const N: usize> {
    image: [u8; N],
}

pub type Perm4 = Perm<4>;
pub type Perm3 = Perm<3>;

impl<const N: usize> Perm<N> {
    pub fn identity() -> Self {
        Perm { image: std::array::from_fn(|i| i as u8) }
    }

    /// Build from a 1-based image array (`image[i] = σ(i+1)`).
    pub fn from_image(image: [u8; N]) -> Result<Self> {
        let mut seen = [false; N];
        let mut out = [0u8; N];
        for (i, &v) in image.iter().enumerate() {
            if v == 0 || v as usize > N || seen[v as usize - 1] {
                return Err(Error::Parse(format!("{image:?} is not a permutation of 1..{N}")));
            }
            seen[v as usize - 1] = true;
            out[i] = v - 1;
        }
        Ok(Perm { image: out })
    }

    /// 1-based image array.
    pub fn image(&self) -> [u8; N] {
        self.image.map(|v| v + 1)
    }

    /// 0-based application.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i] as usize
    }

    /// `compose(p, q)` maps `i` to `q(p(i))`, so its matrix is `P_p · P_q`.
    pub fn compose(&self, other: &Self) -> Self {
        Perm { image: std::array::from_fn(|i| other.image[self.image[i] as usize]) }
    }

    pub fn inverse(&self) -> Self {
        let mut image = [0u8; N];
        for (i, &v) in self.image.iter().enumerate() {
            image[v as usize] = i as u8;
        }
        Perm { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn fixes(&self, i: usize) -> bool {
        self.apply(i) == i
    }

    /// No position is mapped to the same place by both: `P_σ ∘ P_τ = 0`.
    pub fn h_orthogonal(&self, other: &Self) -> bool {
        self.image.iter().zip(other.image.iter()).all(|(a, b)| a != b)
    }

    /// Number of `i` with `σ(i) = τ(i)`.
    pub fn agreements(&self, other: &Self) -> usize {
        self.image.iter().zip(other.image.iter()).filter(|(a, b)| a == b).count()
    }

    pub fn to_matrix<F: Field>(&self) -> Mat<F, N> {
        Mat::from_fn(|i, j| if self.apply(i) == j { F::one() } else { F::zero() })
    }

    /// All `N!` permutations in lexicographic order of their image arrays.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: [u8; N] = std::array::from_fn(|i| i as u8);
        loop {
            out.push(Perm { image: cur });
            // next lexicographic permutation
            let Some(i) = (0..N.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..N).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// Disjoint cycles of length ≥ 2, 1-based, each starting at its smallest
    /// element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let mut seen = [false; N];
        let mut out = Vec::new();
        for start in 0..N {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i as u8 + 1);
                i = self.apply(i);
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    /// Parse a product of disjoint cycles such as `"(13)(24)"`, `"id"` or `"()"`.
    ///
    /// Only single digits `1..=N` are accepted; whitespace is ignored.
    pub fn parse_cycles(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "id" || compact == "()" || compact == "e" {
            return Ok(Self::identity());
        }
        let mut image: [u8; N] = std::array::from_fn(|i| i as u8);
        let mut used = [false; N];
        let mut chars = compact.chars().peekable();
        while let Some(c) = chars.next() {
            if c != '(' {
                return Err(Error::Parse(format!("expected '(' in {text:?}, found {c:?}")));
            }
            let mut cyc = Vec::new();
            loop {
                match chars.next() {
                    Some(')') => break,
                    Some(d) if d.is_ascii_digit() => {
                        let v = d.to_digit(10).unwrap() as usize;
                        if v == 0 || v > N {
                            return Err(Error::Parse(format!("element {v} out of range 1..{N} in {text:?}")));
                        }
                        if used[v - 1] {
                            return Err(Error::Parse(format!("element {v} repeated in {text:?}")));
                        }
                        used[v - 1] = true;
                        cyc.push(v - 1);
                    }
                    Some(other) => {
                        return Err(Error::Parse(format!("unexpected {other:?} in {text:?}")));
                    }
                    None => return Err(Error::Parse(format!("unclosed cycle in {text:?}"))),
                }
            }
            for (k, &e) in cyc.iter().enumerate() {
                image[e] = cyc[(k + 1) % cyc.len()] as u8;
            }
        }
        Ok(Perm { image })
    }

    /// Order of the group element.
    pub fn order(&self) -> usize {
        let mut p = *self;
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc.compose(self))
    }
}

impl Perm4 {
    /// Embed `1 ⊕ σ` for `σ` acting on `{2, 3, 4}`.
    pub fn one_plus(p: &Perm3) -> Self {
        let mut image = [0u8; 4];
        for i in 0..3 {
            image[i + 1] = p.image[i] + 1;
        }
        Perm { image }
    }

    /// The six permutations fixing 1, in lexicographic order.
    pub fn fixing_one() -> Vec<Self> {
        Perm3::all().iter().map(Self::one_plus).collect()
    }
}

/// Parse a cycle string for order 4, panicking on malformed literals.
/// Intended for constants in code and tests.
pub fn p4(text: &str) -> Perm4 {
    Perm4::parse_cycles(text).unwrap_or_else(|e| panic!("bad cycle literal {text:?}: {e}"))
}

pub fn p3(text: &str) -> Perm3 {
    Perm3::parse_cycles(text).unwrap_or_else(|e| panic!("bad cycle literal {text:?}: {e}"))
}

impl<const N: usize> fmt::Display for Perm<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for c in cycles {
            write!(f, "(")?;
            for v in c {
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl<const N: usize> fmt::Debug for Perm<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{self}")
    }
}

impl<const N: usize> FromStr for Perm<N> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_cycles(s)
    }
}

/// JSON form is the 1-based image array.
impl<const N: usize> Serialize for Perm<N> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.image().to_vec().serialize(s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for Perm<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<u8> = Vec::deserialize(d)?;
        let arr: [u8; N] = v
            .try_into()
            .map_err(|_| serde::de::Error::custom(format!("expected {N} entries")))?;
        Perm::from_image(arr).map_err(serde::de::Error::custom)
    }
}

/// A set of four pairwise H-orthogonal permutations from the canonical
/// partition of S₄.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermClass {
    pub index: usize,
    pub members: [Perm4; 4],
}

impl PermClass {
    pub fn contains(&self, p: &Perm4) -> bool {
        self.members.contains(p)
    }
}

const PARTITION: [[&str; 4]; 6] = [
    ["id", "(12)(34)", "(13)(24)", "(14)(23)"],
    ["(23)", "(124)", "(1342)", "(143)"],
    ["(24)", "(123)", "(134)", "(1432)"],
    ["(34)", "(12)", "(1324)", "(1423)"],
    ["(14)", "(1243)", "(132)", "(234)"],
    ["(13)", "(1234)", "(142)", "(243)"],
];

/// The partition of S₄ into six classes of four pairwise H-orthogonal
/// permutations (class `k` is returned at index `k-1`).
pub fn s4_partition() -> [PermClass; 6] {
    std::array::from_fn(|k| PermClass { index: k + 1, members: PARTITION[k].map(p4) })
}

/// The class of the partition containing `p`.
pub fn class_of(p: &Perm4) -> PermClass {
    s4_partition().into_iter().find(|c| c.contains(p)).expect("partition covers S4")
}
