use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::gf2::{canonical_delta_hat, sample_subspace, BitVector, Subspace};

use super::AuthError;

/// Secret key of the authentication scheme, with the derived code data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthKey {
    lambda: usize,
    s: Subspace,
    delta: BitVector,
    x: Vec<BitVector>,
    z: Vec<BitVector>,
    s_delta: Subspace,
    s_hat: Subspace,
    delta_hat: BitVector,
    s_dual: Subspace,
}

impl AuthKey {
    /// Builds a key from its sampled parts and computes the derived fields.
    pub fn from_parts(
        lambda: usize,
        s: Subspace,
        delta: BitVector,
        x: Vec<BitVector>,
        z: Vec<BitVector>,
    ) -> Result<Self, AuthError> {
        let p = 2 * lambda + 1;
        if lambda == 0 {
            return Err(AuthError::InvalidKey("lambda must be at least 1".into()));
        }
        if s.ambient_dim() != p || s.dim() != lambda {
            return Err(AuthError::InvalidKey(format!(
                "S must be a {lambda}-dimensional subspace of F_2^{p}"
            )));
        }
        if x.len() != z.len() || x.is_empty() {
            return Err(AuthError::InvalidKey("x and z must list one mask per wire".into()));
        }
        if delta.len() != p || x.iter().chain(&z).any(|v| v.len() != p) {
            return Err(AuthError::InvalidKey(format!("vectors must have length {p}")));
        }
        if s.contains(&delta) {
            return Err(AuthError::InvalidKey("delta lies in S".into()));
        }
        let s_delta = s.extend(&delta);
        let s_hat = s_delta.dual();
        let delta_hat = canonical_delta_hat(&s, &delta).expect("checked above");
        let s_dual = s.dual();
        Ok(Self { lambda, s, delta, x, z, s_delta, s_hat, delta_hat, s_dual })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Code length p = 2λ+1.
    pub fn p(&self) -> usize {
        2 * self.lambda + 1
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn s(&self) -> &Subspace {
        &self.s
    }

    pub fn delta(&self) -> &BitVector {
        &self.delta
    }

    pub fn x(&self) -> &[BitVector] {
        &self.x
    }

    pub fn z(&self) -> &[BitVector] {
        &self.z
    }

    /// span(S, Δ).
    pub fn s_delta(&self) -> &Subspace {
        &self.s_delta
    }

    /// Ŝ = span(S, Δ)^⊥.
    pub fn s_hat(&self) -> &Subspace {
        &self.s_hat
    }

    pub fn delta_hat(&self) -> &BitVector {
        &self.delta_hat
    }

    /// S^⊥ = span(Ŝ, Δ̂).
    pub fn s_dual(&self) -> &Subspace {
        &self.s_dual
    }

    /// The code used for a block read in `basis`: (S, Δ) for Z, (Ŝ, Δ̂) for X.
    pub fn code(&self, hadamard: bool) -> (&Subspace, &BitVector) {
        if hadamard {
            (&self.s_hat, &self.delta_hat)
        } else {
            (&self.s, &self.delta)
        }
    }
}

/// Samples a key for `n` logical wires at security parameter `lambda`.
pub fn gen<R: Rng + ?Sized>(lambda: usize, n: usize, rng: &mut R) -> Result<AuthKey, AuthError> {
    if lambda == 0 || n == 0 {
        return Err(AuthError::InvalidKey("lambda and n must be at least 1".into()));
    }
    let p = 2 * lambda + 1;
    let s = sample_subspace(p, lambda, rng)?;
    let delta = loop {
        let d = BitVector::random(p, rng);
        if !s.contains(&d) {
            break d;
        }
    };
    let x = (0..n).map(|_| BitVector::random(p, rng)).collect();
    let z = (0..n).map(|_| BitVector::random(p, rng)).collect();
    AuthKey::from_parts(lambda, s, delta, x, z)
}

fn join(vs: &[BitVector]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for AuthKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "auth-key")?;
        writeln!(f, "lambda {}", self.lambda)?;
        writeln!(f, "n {}", self.n())?;
        writeln!(f, "s {}", join(self.s.basis()))?;
        writeln!(f, "delta {}", self.delta)?;
        writeln!(f, "delta-hat {}", self.delta_hat)?;
        writeln!(f, "x {}", join(&self.x))?;
        writeln!(f, "z {}", join(&self.z))
    }
}

impl FromStr for AuthKey {
    type Err = AuthError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut field = |key: &str| -> Result<Vec<String>, AuthError> {
            let line = lines.next().ok_or_else(|| AuthError::Parse(format!("missing `{key}`")))?;
            let mut toks = line.split_whitespace();
            if toks.next() != Some(key) {
                return Err(AuthError::Parse(format!("expected `{key}`, found {line:?}")));
            }
            Ok(toks.map(str::to_string).collect())
        };
        let number = |toks: Vec<String>, key: &str| -> Result<usize, AuthError> {
            match toks.as_slice() {
                [t] => t.parse().map_err(|_| AuthError::Parse(format!("bad `{key}` value {t:?}"))),
                _ => Err(AuthError::Parse(format!("`{key}` takes one value"))),
            }
        };
        let vectors = |toks: Vec<String>| -> Result<Vec<BitVector>, AuthError> {
            toks.iter().map(|t| t.parse().map_err(AuthError::from)).collect()
        };
        field("auth-key")?;
        let lambda = number(field("lambda")?, "lambda")?;
        let n = number(field("n")?, "n")?;
        let p = 2 * lambda + 1;
        let rows = vectors(field("s")?)?;
        let s = Subspace::span(p, &rows)?;
        if s.dim() != rows.len() {
            return Err(AuthError::Parse("S rows are dependent".into()));
        }
        let delta = vectors(field("delta")?)?.pop().ok_or_else(|| AuthError::Parse("missing delta".into()))?;
        let delta_hat = vectors(field("delta-hat")?)?;
        let x = vectors(field("x")?)?;
        let z = vectors(field("z")?)?;
        if x.len() != n {
            return Err(AuthError::Parse(format!("{} x masks for {n} wires", x.len())));
        }
        let key = AuthKey::from_parts(lambda, s, delta, x, z)?;
        if delta_hat.as_slice() != [key.delta_hat.clone()] {
            return Err(AuthError::Parse("delta-hat inconsistent with S and delta".into()));
        }
        Ok(key)
    }
}
