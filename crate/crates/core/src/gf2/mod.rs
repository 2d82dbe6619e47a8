//! Vectors, matrices and subspaces over GF(2).

mod matrix;
mod subspace;
mod vector;

pub use matrix::{rref, BitMatrix};
pub use subspace::{
    canonical_delta_hat, contains, coset_decode, dual, sample_coset_vector, sample_subspace,
    AffineCoset, Subspace,
};
pub use vector::BitVector;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("delta lies inside the subspace")]
    DeltaInSubspace,
    #[error("dimension {dim} exceeds ambient dimension {ambient}")]
    DimensionTooLarge { dim: usize, ambient: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
