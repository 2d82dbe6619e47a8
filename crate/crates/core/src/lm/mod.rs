//! LM quantum programs: alternating CNOT layers and partial measurements
//! driven by classical functions of earlier outcomes.

mod circuit;
mod classical;
mod compile;
mod eval;
mod invariants;
mod magic;
mod program;

pub use circuit::{Circuit, CircuitGate};
pub use classical::{eval_classical_fn, BoundFn, ClassicalFn, DagBuilder, Node, NodeId};
pub use compile::compile;
pub use eval::{lmeval, lmeval_distribution, total_variation, LayerOutcome};
pub use invariants::{check_lm_invariants, LmReport, Violation};
pub use magic::{magic_state, MagicKind};
pub use program::{
    input_var, output_var, result_var, wire_var, FinalLayer, LmProgram, MeasurementLayer, StateTag, LAYER_OUTPUT,
};

use crate::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum LmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("input has {found} bits, expected {expected}")]
    InputLength { expected: usize, found: usize },
    #[error("invalid classical function: {0}")]
    InvalidFunction(String),
    #[error("unbound input {0:?}")]
    UnboundInput(String),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}
