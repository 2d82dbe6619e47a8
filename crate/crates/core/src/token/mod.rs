//! One-shot signature tokens from hidden subspace states, one subspace per
//! message bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::gf2::{sample_subspace, BitVector, Gf2Error, Subspace};
use crate::sim::{self, prepare_subspace_state, Basis, MeasurementSpec, SimError, StateVector, MAX_QUBITS};

#[derive(Debug, thiserror::Error)]
pub enum TokenError {
    #[error("signing key already consumed")]
    Consumed,
    #[error("signing key has not been used yet")]
    NotConsumed,
    #[error("message has {found} bits, key signs {expected}")]
    Length { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// How the signing registers are held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenBackend {
    /// One dense 2κ′-qubit statevector per message bit.
    Dense,
    /// Closed form: a fresh |A⟩ reads uniformly over A in Z and over A^⊥ in X.
    Subspace,
}

impl TokenBackend {
    /// Dense when the registers are small enough to simulate cheaply.
    pub fn auto(kappa_prime: usize) -> Self {
        if 2 * kappa_prime <= 12 {
            TokenBackend::Dense
        } else {
            TokenBackend::Subspace
        }
    }
}

/// The secret subspaces A_1..A_m, held by the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationKey {
    kappa_prime: usize,
    subspaces: Vec<Subspace>,
}

impl VerificationKey {
    pub fn kappa_prime(&self) -> usize {
        self.kappa_prime
    }

    pub fn num_bits(&self) -> usize {
        self.subspaces.len()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }
}

/// Per-bit vectors a_1..a_m.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub vectors: Vec<BitVector>,
}

#[derive(Clone, Debug)]
enum Register {
    Dense(StateVector),
    Fresh,
    Collapsed { basis: Basis, value: BitVector },
}

/// The quantum signing key |sk⟩ = ⊗_j |A_j⟩. Signing consumes it.
#[derive(Clone, Debug)]
pub struct SigningKey {
    kappa_prime: usize,
    subspaces: Vec<Subspace>,
    registers: Vec<Register>,
    consumed: bool,
}

impl SigningKey {
    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    pub fn num_bits(&self) -> usize {
        self.registers.len()
    }

    /// Physical qubits represented, 2κ′ per message bit.
    pub fn num_qubits(&self) -> usize {
        2 * self.kappa_prime * self.registers.len()
    }

    fn measure<R: Rng + ?Sized>(&mut self, x: &BitVector, rng: &mut R) -> Result<Signature, TokenError> {
        if x.len() != self.registers.len() {
            return Err(TokenError::Length { expected: self.registers.len(), found: x.len() });
        }
        let len = 2 * self.kappa_prime;
        let mut vectors = Vec::with_capacity(x.len());
        for (j, reg) in self.registers.iter_mut().enumerate() {
            let basis = Basis::from_bit(x.get(j));
            let a = match reg {
                Register::Dense(st) => {
                    let spec = MeasurementSpec::identity(vec![Some(basis); len]);
                    let res = sim::measure(st, &spec, rng)?;
                    *st = res.post_state;
                    res.outcome
                }
                Register::Fresh => {
                    let a = match basis {
                        Basis::Z => self.subspaces[j].sample_element(rng),
                        Basis::X => self.subspaces[j].dual().sample_element(rng),
                    };
                    *reg = Register::Collapsed { basis, value: a.clone() };
                    a
                }
                Register::Collapsed { basis: b, value } => {
                    if *b == basis {
                        value.clone()
                    } else {
                        let a = BitVector::random(len, rng);
                        *reg = Register::Collapsed { basis, value: a.clone() };
                        a
                    }
                }
            };
            vectors.push(a);
        }
        Ok(Signature { vectors })
    }

    /// Measures what is left of a used key as if signing `x`.
    pub fn residual_signature<R: Rng + ?Sized>(&mut self, x: &BitVector, rng: &mut R) -> Result<Signature, TokenError> {
        if !self.consumed {
            return Err(TokenError::NotConsumed);
        }
        self.measure(x, rng)
    }
}

/// Samples m independent κ′-dimensional subspaces of F_2^{2κ′} and their states.
pub fn tok_gen<R: Rng + ?Sized>(
    kappa_prime: usize,
    m: usize,
    backend: TokenBackend,
    rng: &mut R,
) -> Result<(VerificationKey, SigningKey), TokenError> {
    let len = 2 * kappa_prime;
    if backend == TokenBackend::Dense && len > MAX_QUBITS {
        return Err(SimError::CapExceeded { requested: len, cap: MAX_QUBITS }.into());
    }
    let subspaces = (0..m)
        .map(|_| sample_subspace(len, kappa_prime, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let registers = subspaces
        .iter()
        .map(|a| match backend {
            TokenBackend::Dense => Ok(Register::Dense(prepare_subspace_state(a, &BitVector::zeros(len))?)),
            TokenBackend::Subspace => Ok(Register::Fresh),
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok((
        VerificationKey { kappa_prime, subspaces: subspaces.clone() },
        SigningKey { kappa_prime, subspaces, registers, consumed: false },
    ))
}

/// Signs `x`: bit j is read in Z (x_j = 0) or X (x_j = 1). Zero vectors are
/// returned as measured.
pub fn tok_sign<R: Rng + ?Sized>(x: &BitVector, sk: &mut SigningKey, rng: &mut R) -> Result<Signature, TokenError> {
    if sk.consumed {
        return Err(TokenError::Consumed);
    }
    let sig = sk.measure(x, rng)?;
    sk.consumed = true;
    Ok(sig)
}

/// ⊤ iff every a_j is nonzero and lies in A_j (x_j = 0) or A_j^⊥ (x_j = 1).
pub fn tok_ver(vk: &VerificationKey, x: &BitVector, sig: &Signature) -> bool {
    let len = 2 * vk.kappa_prime;
    if x.len() != vk.subspaces.len() || sig.vectors.len() != x.len() {
        return false;
    }
    sig.vectors.iter().zip(&vk.subspaces).enumerate().all(|(j, (a, space))| {
        a.len() == len
            && !a.is_zero()
            && if x.get(j) {
                space.dual().contains(a)
            } else {
                space.contains(a)
            }
    })
}

impl fmt::Display for VerificationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "token-vk")?;
        writeln!(f, "kappa-prime {}", self.kappa_prime)?;
        writeln!(f, "bits {}", self.subspaces.len())?;
        for a in &self.subspaces {
            let rows: Vec<String> = a.basis().iter().map(|r| r.to_string()).collect();
            writeln!(f, "a {}", rows.join(" "))?;
        }
        Ok(())
    }
}

fn keyed<'a>(line: Option<&'a str>, key: &str) -> Result<Vec<&'a str>, TokenError> {
    let line = line.ok_or_else(|| TokenError::Parse(format!("missing `{key}`")))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some(key) {
        return Err(TokenError::Parse(format!("expected `{key}`, found {line:?}")));
    }
    Ok(toks.collect())
}

fn single_number(toks: Vec<&str>, key: &str) -> Result<usize, TokenError> {
    match toks.as_slice() {
        [t] => t.parse().map_err(|_| TokenError::Parse(format!("bad `{key}` value {t:?}"))),
        _ => Err(TokenError::Parse(format!("`{key}` takes one value"))),
    }
}

impl FromStr for VerificationKey {
    type Err = TokenError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        keyed(lines.next(), "token-vk")?;
        let kappa_prime = single_number(keyed(lines.next(), "kappa-prime")?, "kappa-prime")?;
        let m = single_number(keyed(lines.next(), "bits")?, "bits")?;
        let subspaces = (0..m)
            .map(|_| {
                let rows = keyed(lines.next(), "a")?;
                let s = Subspace::from_rows_text(2 * kappa_prime, &rows)?;
                if s.dim() != kappa_prime {
                    return Err(TokenError::Parse(format!("subspace has dimension {} not {kappa_prime}", s.dim())));
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(extra) = lines.next() {
            return Err(TokenError::Parse(format!("trailing content {extra:?}")));
        }
        Ok(Self { kappa_prime, subspaces })
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.vectors {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for Signature {
    type Err = TokenError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let vectors = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse().map_err(TokenError::from))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { vectors })
    }
}
