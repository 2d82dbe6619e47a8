//! Linearly homomorphic quantum authentication with classically decodable
//! ZX measurements.

mod key;
mod register;
mod scheme;
mod twirl;

pub use key::{gen, AuthKey};
pub use register::{Block, EncodedRegister, LogicalRegister};
pub use scheme::{
    dec, decode_block, enc, invert_linear, lin_eval, logical_measure, logical_measure_branches, pauli_update,
    split_blocks, ver, AuthMeasurement, CodewordTuple,
};
pub use twirl::{twirled_sum, verify_pauli_twirl, ComplexMatrix, TwirlInstance, MAX_TWIRL_QUBITS};

pub use crate::sim::BasisString;

use crate::gf2::Gf2Error;
use crate::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum AuthError {
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported in the logical representation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}
