//! Obfuscation of LM programs behind classical oracles F_1..F_t and G,
//! the evaluator, simulated oracles and a scripted attack harness.

mod attack;
mod catalog;
mod encoding;
mod oracle;
mod params;
mod prf;
mod qobf;
mod wire;

pub use attack::{honest_run, mutate_query, run_attack, AttackKind, AttackReport, HonestRun};
pub use catalog::DETERMINISTIC_PROGRAMS;
pub use encoding::{BotReason, Decoder, Encoder, OracleQuery, OracleResponse};
pub use oracle::{EmissionLog, OracleKey, OracleMode, OracleSet, Oracles, Recording};
pub use params::{ObfParams, RegisterMode, AUTO_PHYSICAL_QUBITS, MIN_KAPPA};
pub use prf::{PrfKey, PRF_KEY_BYTES};
pub use qobf::{qeval, qobf, LayerShape, ObfuscatedProgram, ProgramShape};
pub use wire::{format_request, parse_request, serve, RemoteOracle};

use crate::auth::AuthError;
use crate::lm::LmError;
use crate::sim::SimError;
use crate::token::TokenError;

#[derive(Debug, thiserror::Error)]
pub enum ObfError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("input has {found} bits, program takes {expected}")]
    InputLength { expected: usize, found: usize },
    #[error("oracle returned ⊥ at layer {layer}{}", reason.map(|r| format!(" ({r})")).unwrap_or_default())]
    Rejected { layer: usize, reason: Option<BotReason> },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Auth(#[from] AuthError),
    #[error(transparent)]
    Token(#[from] TokenError),
    #[error(transparent)]
    Sim(#[from] SimError),
}
