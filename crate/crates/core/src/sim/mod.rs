//! Exact dense statevector simulation with partial ZX measurements.

mod basis;
mod measure;
mod state;
mod wires;

pub use basis::BasisString;
pub use measure::{
    branches, measure, outcome_probabilities, Basis, Branch, MeasurementResult, MeasurementSpec,
    NEGLIGIBLE_WEIGHT,
};
pub use state::{
    apply_encoding_isometry, apply_gate, prepare_subspace_state, state_distance, Cnot, Gate,
    StateVector,
};
pub use wires::WireRegister;

use thiserror::Error;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{requested} qubits exceeds the simulator cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} used twice in one gate")]
    RepeatedQubit(usize),
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("qubit {qubit} is not in a definite basis state (p1 = {prob_one})")]
    NotDefinite { qubit: usize, prob_one: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}
