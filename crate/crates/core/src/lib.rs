//! Orthogonal permutative matrices of order 4.
//!
//! Exact rational and binary64 backends, the parametric families of 4×4
//! orthogonal permutative matrices, decomposition over permutation matrices,
//! zero-pattern tests, classification of orthogonal matrices in the span of
//! permutation matrices, and a verification suite.

pub mod blocks;
pub mod classify;
pub mod error;
pub mod decompose;
pub mod families;
pub mod io;
pub mod linalg;
pub mod mat;
pub mod patterns;
pub mod perm;
pub mod sampling;
pub mod scalar;
pub mod scans;
pub mod verify;

pub use error::{Error, Result};
pub use mat::{Mat, Mat2, Mat3, Mat4};
pub use perm::{Perm, Perm3, Perm4};
pub use scalar::{Field, Scalar, Q};
