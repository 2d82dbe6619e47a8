use rand::Rng;

use crate::gf2::BitVector;
use crate::sim::{self, Basis, Cnot, Gate, MeasurementSpec, StateVector, WireRegister};

use super::scheme::{enc, lin_eval};
use super::{AuthError, AuthKey};

/// State of one code block in the logical representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    /// X^x Z^z E|φ⟩ with E = E_{S,Δ}, or E_{Ŝ,Δ̂} when `hadamard` is set; the
    /// logical wire then carries H|φ⟩.
    Code { hadamard: bool, x: BitVector, z: BitVector },
    /// The computational basis state |raw⟩, under H^{⊗p} when `hadamard` is set.
    Collapsed { raw: BitVector, hadamard: bool },
}

/// Encoded register held as logical wires plus a per-block Pauli frame.
///
/// Exact for every operation the evaluator performs: transversal CNOTs,
/// transversal Hadamards, Pauli masks and standard basis readouts of whole
/// blocks whose response depends only on the readout's cosets.
#[derive(Clone, Debug)]
pub struct LogicalRegister {
    key: AuthKey,
    wires: WireRegister,
    blocks: Vec<Block>,
}

impl LogicalRegister {
    pub fn new(key: &AuthKey, factors: Vec<(Vec<usize>, StateVector)>) -> Result<Self, AuthError> {
        let n = key.n();
        let wires = WireRegister::new(n, factors)?;
        let blocks = (0..n)
            .map(|i| Block::Code { hadamard: false, x: key.x()[i].clone(), z: key.z()[i].clone() })
            .collect();
        Ok(Self { key: key.clone(), wires, blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn cnot(&mut self, c: Cnot) -> Result<(), AuthError> {
        let (i, j) = (c.control, c.target);
        match (&self.blocks[i], &self.blocks[j]) {
            (Block::Code { hadamard: hi, .. }, Block::Code { hadamard: hj, .. }) if hi == hj => {}
            _ => {
                return Err(AuthError::Unsupported(format!(
                    "transversal CNOT {i}>{j} between blocks of different kinds"
                )))
            }
        }
        self.wires.apply(Gate::Cnot(c))?;
        let (xi, zj) = match (&self.blocks[i], &self.blocks[j]) {
            (Block::Code { x, .. }, Block::Code { z, .. }) => (x.clone(), z.clone()),
            _ => unreachable!(),
        };
        if let Block::Code { z, .. } = &mut self.blocks[i] {
            z.xor_assign(&zj);
        }
        if let Block::Code { x, .. } = &mut self.blocks[j] {
            x.xor_assign(&xi);
        }
        Ok(())
    }

    fn hadamard(&mut self, b: usize) -> Result<(), AuthError> {
        match &mut self.blocks[b] {
            Block::Code { hadamard, x, z } => {
                *hadamard = !*hadamard;
                std::mem::swap(x, z);
            }
            Block::Collapsed { hadamard, .. } => {
                *hadamard = !*hadamard;
                return Ok(());
            }
        }
        self.wires.apply(Gate::H(b))?;
        Ok(())
    }

    fn apply_pauli(&mut self, b: usize, ex: &BitVector, ez: &BitVector) {
        match &mut self.blocks[b] {
            Block::Code { x, z, .. } => {
                x.xor_assign(ex);
                z.xor_assign(ez);
            }
            Block::Collapsed { raw, hadamard: false } => raw.xor_assign(ex),
            Block::Collapsed { raw, hadamard: true } => raw.xor_assign(ez),
        }
    }

    fn codeword<R: Rng + ?Sized>(&self, b: usize, bit: bool, rng: Option<&mut R>) -> BitVector {
        let Block::Code { hadamard, x, .. } = &self.blocks[b] else {
            unreachable!("codeword of a collapsed block")
        };
        let (space, delta) = self.key.code(*hadamard);
        let mut v = match rng {
            Some(rng) => space.sample_element(rng),
            None => BitVector::zeros(self.key.p()),
        };
        v.xor_assign(x);
        if bit {
            v.xor_assign(delta);
        }
        v
    }

    fn measure_wires<R: Rng + ?Sized>(&mut self, wires: &[usize], rng: &mut R) -> Result<Vec<bool>, AuthError> {
        for &w in wires {
            self.wires.ensure_live(w)?;
        }
        let nq = self.wires.live_state().num_qubits();
        let mut bases = vec![None; nq];
        for &w in wires {
            bases[self.wires.live_qubit(w).expect("live")] = Some(Basis::Z);
        }
        let res = sim::measure(self.wires.live_state(), &MeasurementSpec::identity(bases), rng)?;
        *self.wires.live_state_mut() = res.post_state;
        wires.iter().map(|&w| Ok(self.wires.freeze(w, Basis::Z)?)).collect()
    }

    fn query<O, F, R>(&mut self, blocks: &[usize], collapse: &[bool], oracle: F, rng: &mut R) -> Result<O, AuthError>
    where
        O: Ord + Clone,
        F: Fn(&[BitVector]) -> O,
        R: Rng + ?Sized,
    {
        let p = self.key.p();
        let mut raw: Vec<Option<BitVector>> = vec![None; blocks.len()];
        let mut full = Vec::new();
        let mut partial = Vec::new();
        for (k, &b) in blocks.iter().enumerate() {
            match &self.blocks[b] {
                Block::Collapsed { raw: r, hadamard: false } => raw[k] = Some(r.clone()),
                Block::Collapsed { hadamard: true, .. } => {
                    let r = BitVector::random(p, rng);
                    self.blocks[b] = Block::Collapsed { raw: r.clone(), hadamard: false };
                    raw[k] = Some(r);
                }
                Block::Code { .. } if collapse[k] => full.push(k),
                Block::Code { .. } => partial.push(k),
            }
        }

        let wires: Vec<usize> = full.iter().map(|&k| blocks[k]).collect();
        let bits = self.measure_wires(&wires, rng)?;
        for (&k, bit) in full.iter().zip(bits) {
            let b = blocks[k];
            let v = self.codeword(b, bit, Some(&mut *rng));
            self.blocks[b] = Block::Collapsed { raw: v.clone(), hadamard: false };
            raw[k] = Some(v);
        }

        let partial_wires: Vec<usize> = partial.iter().map(|&k| blocks[k]).collect();
        for &w in &partial_wires {
            self.wires.ensure_live(w)?;
        }
        let nq = self.wires.live_state().num_qubits();
        let mut bases = vec![None; nq];
        let mut qubits: Vec<(usize, usize)> = Vec::new();
        for (&k, &w) in partial.iter().zip(&partial_wires) {
            let q = self.wires.live_qubit(w).expect("live");
            bases[q] = Some(Basis::Z);
            qubits.push((k, q));
        }
        let mut order: Vec<usize> = qubits.iter().map(|&(_, q)| q).collect();
        order.sort_unstable();
        let reps: Vec<(usize, [BitVector; 2])> = qubits
            .iter()
            .map(|&(k, q)| {
                let b = blocks[k];
                let pos = order.binary_search(&q).expect("present");
                (pos, [self.codeword::<R>(b, false, None), self.codeword::<R>(b, true, None)])
            })
            .collect();
        let fixed = raw;
        let spec = MeasurementSpec::new(bases, |bits: &BitVector| {
            let mut input: Vec<BitVector> = fixed.iter().map(|r| r.clone().unwrap_or_else(|| BitVector::zeros(0))).collect();
            for (&k, (pos, pair)) in partial.iter().zip(&reps) {
                input[k] = pair[usize::from(bits.get(*pos))].clone();
            }
            oracle(&input)
        });
        let res = sim::measure(self.wires.live_state(), &spec, rng)?;
        *self.wires.live_state_mut() = res.post_state;
        Ok(res.outcome)
    }
}

/// An authenticated register, either dense over n·p physical qubits or in
/// the logical representation.
#[derive(Clone, Debug)]
pub enum EncodedRegister {
    Physical { p: usize, n: usize, state: StateVector },
    Logical(Box<LogicalRegister>),
}

impl EncodedRegister {
    /// Enc_k applied to a dense logical state.
    pub fn physical(key: &AuthKey, logical: &StateVector) -> Result<Self, AuthError> {
        Ok(Self::Physical { p: key.p(), n: key.n(), state: enc(key, logical)? })
    }

    /// Enc_k applied to a product of logical factors, kept logical.
    pub fn logical(key: &AuthKey, factors: Vec<(Vec<usize>, StateVector)>) -> Result<Self, AuthError> {
        Ok(Self::Logical(Box::new(LogicalRegister::new(key, factors)?)))
    }

    pub fn num_blocks(&self) -> usize {
        match self {
            Self::Physical { n, .. } => *n,
            Self::Logical(r) => r.blocks.len(),
        }
    }

    fn check_block(&self, b: usize) -> Result<(), AuthError> {
        if b >= self.num_blocks() {
            return Err(AuthError::Shape(format!("block {b} out of range")));
        }
        Ok(())
    }

    /// Transversal CNOTs between blocks.
    pub fn lin_eval(&mut self, l: &[Cnot]) -> Result<(), AuthError> {
        for c in l {
            self.check_block(c.control)?;
            self.check_block(c.target)?;
        }
        match self {
            Self::Physical { p, state, .. } => *state = lin_eval(l, state, *p)?,
            Self::Logical(r) => {
                for c in l {
                    r.cnot(*c)?;
                }
            }
        }
        Ok(())
    }

    /// H^{⊗p} on each listed block.
    pub fn hadamard_blocks(&mut self, blocks: &[usize]) -> Result<(), AuthError> {
        for &b in blocks {
            self.check_block(b)?;
            match self {
                Self::Physical { p, state, .. } => {
                    for q in b * *p..(b + 1) * *p {
                        state.apply(Gate::H(q))?;
                    }
                }
                Self::Logical(r) => r.hadamard(b)?,
            }
        }
        Ok(())
    }

    /// X^x Z^z on one block.
    pub fn apply_pauli(&mut self, b: usize, x: &BitVector, z: &BitVector) -> Result<(), AuthError> {
        self.check_block(b)?;
        match self {
            Self::Physical { p, state, .. } => {
                if x.len() != *p || z.len() != *p {
                    return Err(AuthError::Shape("Pauli mask length differs from p".into()));
                }
                state.apply_pauli(b * *p, x, z)?;
            }
            Self::Logical(r) => r.apply_pauli(b, x, z),
        }
        Ok(())
    }

    /// Reads the listed blocks in the standard basis and returns
    /// `oracle(readouts)`, collapsing the register onto the returned value.
    ///
    /// In the logical representation blocks flagged in `collapse` are read
    /// out completely, and the others only as far as the response reveals;
    /// the oracle must depend on those only through their cosets.
    pub fn query<O, F, R>(&mut self, blocks: &[usize], collapse: &[bool], oracle: F, rng: &mut R) -> Result<O, AuthError>
    where
        O: Ord + Clone,
        F: Fn(&[BitVector]) -> O,
        R: Rng + ?Sized,
    {
        if collapse.len() != blocks.len() {
            return Err(AuthError::Shape("one collapse flag per block".into()));
        }
        for &b in blocks {
            self.check_block(b)?;
        }
        match self {
            Self::Physical { p, state, .. } => {
                let p = *p;
                let mut bases = vec![None; state.num_qubits()];
                for &b in blocks {
                    for slot in &mut bases[b * p..(b + 1) * p] {
                        *slot = Some(Basis::Z);
                    }
                }
                let mut sorted = blocks.to_vec();
                sorted.sort_unstable();
                let rank: Vec<usize> = blocks.iter().map(|b| sorted.binary_search(b).expect("present")).collect();
                let spec = MeasurementSpec::new(bases, |bits: &BitVector| {
                    let input: Vec<BitVector> =
                        rank.iter().map(|&r| bits.slice(r * p, (r + 1) * p)).collect();
                    oracle(&input)
                });
                let res = sim::measure(state, &spec, rng)?;
                *state = res.post_state;
                Ok(res.outcome)
            }
            Self::Logical(r) => r.query(blocks, collapse, oracle, rng),
        }
    }
}
