//! Gram determinants, hyperplane distances, generalized characteristic
//! polynomials and a streaming engine for Gram-determinant ratios of growing
//! truncations of infinite vector families.
//!
//! Every routine is generic over [`Scalar`], implemented by [`Rational`]
//! (exact) and `f64`.

pub mod charpoly;
pub mod engine;
pub mod error;
pub mod family;
pub mod hyperplane;
pub mod linalg;
pub mod matrix;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{gram_matrix, Matrix, SubsetIndex, SymMatrix};
pub use scalar::{Rational, Scalar, ScalarMode, Tolerance};
