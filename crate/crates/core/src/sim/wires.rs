use super::{Basis, Gate, SimError, StateVector};
use crate::gf2::BitVector;

#[derive(Clone, Debug, PartialEq)]
enum Slot {
    Pending(usize),
    Live(usize),
    Frozen { basis: Basis, value: bool },
}

/// Wire-addressed state held as a product of pending factors, a dense live
/// part, and frozen single-wire basis states.
///
/// Factors join the dense part the first time one of their wires is touched;
/// frozen wires are rejoined on demand. Only the live part costs memory.
#[derive(Clone, Debug)]
pub struct WireRegister {
    live: StateVector,
    slots: Vec<Slot>,
    factors: Vec<Option<(Vec<usize>, StateVector)>>,
}

impl WireRegister {
    /// `factors` must cover every wire in `0..num_wires` exactly once.
    pub fn new(num_wires: usize, factors: Vec<(Vec<usize>, StateVector)>) -> Result<Self, SimError> {
        let mut slots = vec![None; num_wires];
        for (id, (wires, st)) in factors.iter().enumerate() {
            if wires.len() != st.num_qubits() {
                return Err(SimError::SizeMismatch(wires.len(), st.num_qubits()));
            }
            for &w in wires {
                if w >= num_wires {
                    return Err(SimError::QubitOutOfRange { qubit: w, num_qubits: num_wires });
                }
                if slots[w].is_some() {
                    return Err(SimError::RepeatedQubit(w));
                }
                slots[w] = Some(Slot::Pending(id));
            }
        }
        let slots = slots
            .into_iter()
            .enumerate()
            .map(|(w, s)| s.ok_or(SimError::QubitOutOfRange { qubit: w, num_qubits: num_wires }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            live: StateVector::zero(0)?,
            slots,
            factors: factors.into_iter().map(Some).collect(),
        })
    }

    /// All wires start as independent single-wire factors.
    pub fn from_product(states: Vec<StateVector>) -> Result<Self, SimError> {
        let n = states.len();
        Self::new(n, states.into_iter().enumerate().map(|(w, s)| (vec![w], s)).collect())
    }

    pub fn num_wires(&self) -> usize {
        self.slots.len()
    }

    pub fn live_state(&self) -> &StateVector {
        &self.live
    }

    pub fn live_state_mut(&mut self) -> &mut StateVector {
        &mut self.live
    }

    pub fn live_qubit(&self, wire: usize) -> Option<usize> {
        match self.slots[wire] {
            Slot::Live(q) => Some(q),
            _ => None,
        }
    }

    pub fn frozen(&self, wire: usize) -> Option<(Basis, bool)> {
        match self.slots[wire] {
            Slot::Frozen { basis, value } => Some((basis, value)),
            _ => None,
        }
    }

    fn append(&mut self, st: &StateVector) -> Result<usize, SimError> {
        let first = self.live.num_qubits();
        self.live = self.live.tensor(st)?;
        Ok(first)
    }

    /// Brings `wire` into the dense part and returns its qubit index.
    pub fn ensure_live(&mut self, wire: usize) -> Result<usize, SimError> {
        match self.slots[wire].clone() {
            Slot::Live(q) => Ok(q),
            Slot::Pending(id) => {
                let (wires, st) = self.factors[id].take().expect("pending factor present");
                let first = self.append(&st)?;
                for (k, &w) in wires.iter().enumerate() {
                    self.slots[w] = Slot::Live(first + k);
                }
                Ok(first + wires.iter().position(|&w| w == wire).expect("wire in factor"))
            }
            Slot::Frozen { basis, value } => {
                let mut st = StateVector::basis_state(&BitVector::from_bits(&[value]))?;
                if basis == Basis::X {
                    st.apply(Gate::H(0))?;
                }
                let q = self.append(&st)?;
                self.slots[wire] = Slot::Live(q);
                Ok(q)
            }
        }
    }

    /// Applies a gate addressed by wire indices.
    pub fn apply(&mut self, gate: Gate) -> Result<(), SimError> {
        let mapped = match gate {
            Gate::X(w) => Gate::X(self.ensure_live(w)?),
            Gate::Z(w) => Gate::Z(self.ensure_live(w)?),
            Gate::H(w) => Gate::H(self.ensure_live(w)?),
            Gate::T(w) => Gate::T(self.ensure_live(w)?),
            Gate::Cnot(c) => {
                if c.control == c.target {
                    return Err(SimError::RepeatedQubit(c.control));
                }
                let control = self.ensure_live(c.control)?;
                let target = self.ensure_live(c.target)?;
                Gate::Cnot(super::Cnot { control, target })
            }
        };
        self.live.apply(mapped)
    }

    /// Removes a wire that is in a definite state of `basis` from the dense
    /// part and records its value.
    pub fn freeze(&mut self, wire: usize, basis: Basis) -> Result<bool, SimError> {
        match self.slots[wire].clone() {
            Slot::Frozen { basis: b, value } if b == basis => Ok(value),
            Slot::Live(q) => {
                let (value, rest) = self.live.take_qubit(q, basis)?;
                self.live = rest;
                for s in self.slots.iter_mut() {
                    if let Slot::Live(k) = s {
                        if *k > q {
                            *k -= 1;
                        }
                    }
                }
                self.slots[wire] = Slot::Frozen { basis, value };
                Ok(value)
            }
            _ => {
                self.ensure_live(wire)?;
                self.freeze(wire, basis)
            }
        }
    }
}
