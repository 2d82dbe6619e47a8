use std::fmt;
use std::str::FromStr;

use super::{Basis, SimError};

/// A per-wire measurement basis θ ∈ {0, 1, ⊥}ⁿ.
///
/// Textual form uses `0` for Z, `1` for X and `-` for unmeasured wires.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisString(Vec<Option<Basis>>);

impl BasisString {
    pub fn new(theta: Vec<Option<Basis>>) -> Self {
        Self(theta)
    }

    pub fn unmeasured(n: usize) -> Self {
        Self(vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, wire: usize) -> Option<Basis> {
        self.0[wire]
    }

    pub fn set(&mut self, wire: usize, basis: Option<Basis>) {
        self.0[wire] = basis;
    }

    pub fn as_slice(&self) -> &[Option<Basis>] {
        &self.0
    }

    /// Measured wires Φ in increasing order.
    pub fn phi(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i].is_some()).collect()
    }

    pub fn phi_z(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] == Some(Basis::Z)).collect()
    }

    pub fn phi_x(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] == Some(Basis::X)).collect()
    }

    pub fn phi_unmeasured(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i].is_none()).collect()
    }

    /// Physical indices of the blocks of `block_len` qubits for `wires`.
    pub fn blow_up(wires: &[usize], block_len: usize) -> Vec<usize> {
        wires
            .iter()
            .flat_map(|&w| w * block_len..(w + 1) * block_len)
            .collect()
    }

    /// The basis string over `n · block_len` physical qubits.
    pub fn blown_up(&self, block_len: usize) -> BasisString {
        BasisString(
            self.0
                .iter()
                .flat_map(|b| std::iter::repeat_n(*b, block_len))
                .collect(),
        )
    }

    /// Restriction θ[Φ] to the listed wires.
    pub fn restrict(&self, wires: &[usize]) -> Vec<Option<Basis>> {
        wires.iter().map(|&w| self.0[w]).collect()
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(match b {
                None => "-",
                Some(Basis::Z) => "0",
                Some(Basis::X) => "1",
            })?;
        }
        Ok(())
    }
}

impl FromStr for BasisString {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '-' => Ok(None),
                '0' => Ok(Some(Basis::Z)),
                '1' => Ok(Some(Basis::X)),
                other => Err(SimError::Parse(format!("invalid basis character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BasisString)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_sets_partition() {
        let th: BasisString = "01-1".parse().unwrap();
        assert_eq!(th.phi(), vec![0, 1, 3]);
        assert_eq!(th.phi_z(), vec![0]);
        assert_eq!(th.phi_x(), vec![1, 3]);
        assert_eq!(th.phi_unmeasured(), vec![2]);
        assert_eq!(th.to_string(), "01-1");
    }

    #[test]
    fn blown_up_blocks() {
        let th: BasisString = "-1".parse().unwrap();
        assert_eq!(BasisString::blow_up(&th.phi(), 3), vec![3, 4, 5]);
        assert_eq!(th.blown_up(3).to_string(), "---111");
    }
}
