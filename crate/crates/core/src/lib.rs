//! Quantum state obfuscation from classical oracles, simulated exactly at small sizes.

pub mod gf2;
pub mod sim;
pub mod lm;
pub mod auth;
pub mod token;
pub mod obf;
