use crate::sim::MAX_QUBITS;
use crate::token::TokenBackend;

use super::ObfError;

/// Smallest label length accepted outside of `use_paper_kappa`.
pub const MIN_KAPPA: usize = 8;

/// How the encoded program register is held during evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegisterMode {
    /// Physical when n·p fits [`AUTO_PHYSICAL_QUBITS`], logical otherwise.
    Auto,
    Physical,
    Logical,
}

/// Largest n·p that [`RegisterMode::Auto`] simulates densely.
pub const AUTO_PHYSICAL_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObfParams {
    /// Authentication security parameter; blocks have p = 2λ+1 qubits.
    pub lambda: usize,
    /// Label length in bits.
    pub kappa: usize,
    /// Token subspace dimension; each token register has 2κ′ qubits.
    pub kappa_prime: usize,
    /// Use κ = max(λ, n⁴) instead of `kappa`.
    pub use_paper_kappa: bool,
    pub register: RegisterMode,
    /// `None` picks [`TokenBackend::auto`].
    pub token_backend: Option<TokenBackend>,
}

impl Default for ObfParams {
    fn default() -> Self {
        Self {
            lambda: 2,
            kappa: 64,
            kappa_prime: 4,
            use_paper_kappa: false,
            register: RegisterMode::Auto,
            token_backend: None,
        }
    }
}

impl ObfParams {
    pub fn validate(&self) -> Result<(), ObfError> {
        if self.lambda == 0 {
            return Err(ObfError::Params("lambda must be at least 1".into()));
        }
        if self.kappa_prime == 0 {
            return Err(ObfError::Params("kappa-prime must be at least 1".into()));
        }
        if !self.use_paper_kappa && self.kappa < MIN_KAPPA {
            return Err(ObfError::Params(format!("kappa must be at least {MIN_KAPPA}")));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        2 * self.lambda + 1
    }

    pub fn effective_kappa(&self, num_wires: usize) -> usize {
        if self.use_paper_kappa {
            self.lambda.max(num_wires.pow(4))
        } else {
            self.kappa
        }
    }

    pub fn backend(&self) -> TokenBackend {
        self.token_backend.unwrap_or_else(|| TokenBackend::auto(self.kappa_prime))
    }

    /// Whether an `num_wires`-wire program is held as a dense statevector.
    pub fn physical(&self, num_wires: usize) -> Result<bool, ObfError> {
        let qubits = num_wires * self.p();
        match self.register {
            RegisterMode::Auto => Ok(qubits <= AUTO_PHYSICAL_QUBITS),
            RegisterMode::Logical => Ok(false),
            RegisterMode::Physical if qubits > MAX_QUBITS => Err(ObfError::Params(format!(
                "physical register needs {qubits} qubits, cap is {MAX_QUBITS}"
            ))),
            RegisterMode::Physical => Ok(true),
        }
    }
}
