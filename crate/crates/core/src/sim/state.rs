use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Basis, SimError, MAX_QUBITS};
use crate::gf2::{BitVector, Subspace};

const NORM_TOLERANCE: f64 = 1e-9;

/// A two-qubit CNOT with distinct control and target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cnot {
    pub control: usize,
    pub target: usize,
}

impl Cnot {
    pub fn new(control: usize, target: usize) -> Self {
        Self { control, target }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    T(usize),
    Cnot(Cnot),
}

/// Dense statevector. Qubit 0 is the most significant bit of the basis index,
/// so basis labels read left to right in qubit order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n: usize) -> Result<(), SimError> {
    if n > MAX_QUBITS {
        Err(SimError::CapExceeded { requested: n, cap: MAX_QUBITS })
    } else {
        Ok(())
    }
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Result<Self, SimError> {
        check_cap(num_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn basis_state(bits: &BitVector) -> Result<Self, SimError> {
        let mut s = Self::zero(bits.len())?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[bits.to_u64() as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Builds a state from raw amplitudes; the length must be a power of two
    /// and the norm 1 within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if !amps.len().is_power_of_two() {
            return Err(SimError::BadLength(amps.len()));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_cap(n)?;
        let s = Self { num_qubits: n, amps };
        let norm = s.norm_sqr().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Like [`StateVector::from_amplitudes`] but rescales to unit norm.
    pub fn from_unnormalized(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if !amps.len().is_power_of_two() {
            return Err(SimError::BadLength(amps.len()));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_cap(n)?;
        let mut s = Self { num_qubits: n, amps };
        let norm = s.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(SimError::NotNormalized(0.0));
        }
        s.scale(1.0 / norm);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, bits: &BitVector) -> Complex64 {
        assert_eq!(bits.len(), self.num_qubits);
        self.amps[bits.to_u64() as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for a in self.amps.iter_mut() {
            *a *= factor;
        }
    }

    pub(crate) fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        self.scale(1.0 / norm);
    }

    #[inline]
    pub(crate) fn bit_mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.num_qubits {
            Err(SimError::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits })
        } else {
            Ok(())
        }
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: Gate) -> Result<(), SimError> {
        match gate {
            Gate::X(q) => {
                self.check_qubit(q)?;
                let m = self.bit_mask(q);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            Gate::Z(q) => {
                self.check_qubit(q)?;
                let m = self.bit_mask(q);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::T(q) => {
                self.check_qubit(q)?;
                let m = self.bit_mask(q);
                let phase = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= phase;
                    }
                }
            }
            Gate::H(q) => {
                self.check_qubit(q)?;
                let m = self.bit_mask(q);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | m];
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Cnot(Cnot { control, target }) => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(SimError::RepeatedQubit(control));
                }
                let c = self.bit_mask(control);
                let t = self.bit_mask(target);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
        }
        debug_assert!((self.norm_sqr() - 1.0).abs() < NORM_TOLERANCE, "gate broke normalization");
        Ok(())
    }

    /// Applies `X^x Z^z` over the first `x.len()` qubits starting at `offset`.
    pub fn apply_pauli(&mut self, offset: usize, x: &BitVector, z: &BitVector) -> Result<(), SimError> {
        for k in 0..z.len() {
            if z.get(k) {
                self.apply(Gate::Z(offset + k))?;
            }
        }
        for k in 0..x.len() {
            if x.get(k) {
                self.apply(Gate::X(offset + k))?;
            }
        }
        Ok(())
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, SimError> {
        let n = self.num_qubits + other.num_qubits;
        check_cap(n)?;
        let mut amps = Vec::with_capacity(1usize << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Probability that `qubit` reads 1 in the computational basis.
    pub fn prob_one(&self, qubit: usize) -> f64 {
        let m = self.bit_mask(qubit);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `qubit` onto `|value⟩` and renormalizes.
    pub fn project(&mut self, qubit: usize, value: bool) -> Result<(), SimError> {
        self.check_qubit(qubit)?;
        let m = self.bit_mask(qubit);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & m != 0) != value {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-12 {
            return Err(SimError::NotNormalized(norm));
        }
        self.scale(1.0 / norm);
        Ok(())
    }

    /// Removes a qubit that is in a definite state of `basis`, returning its
    /// value and the remaining state.
    pub fn take_qubit(&self, qubit: usize, basis: Basis) -> Result<(bool, StateVector), SimError> {
        self.check_qubit(qubit)?;
        let mut work = self.clone();
        if basis == Basis::X {
            work.apply(Gate::H(qubit))?;
        }
        let p1 = work.prob_one(qubit);
        let value = if p1 > 1.0 - NORM_TOLERANCE {
            true
        } else if p1 < NORM_TOLERANCE {
            false
        } else {
            return Err(SimError::NotDefinite { qubit, prob_one: p1 });
        };
        let m = work.bit_mask(qubit);
        let low = m - 1;
        let mut amps = Vec::with_capacity(work.amps.len() / 2);
        for i in 0..work.amps.len() / 2 {
            let hi = (i & !low) << 1;
            let idx = hi | (i & low) | if value { m } else { 0 };
            amps.push(work.amps[idx]);
        }
        let mut out = StateVector { num_qubits: self.num_qubits - 1, amps };
        out.renormalize();
        Ok((value, out))
    }

    /// Debug dump: one line per nonzero amplitude, "bitstring re im".
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                let bits = BitVector::from_u64(i as u64, self.num_qubits);
                let _ = writeln!(out, "{bits} {:.17e} {:.17e}", a.re, a.im);
            }
        }
        out
    }
}

/// Returns a new state with `gate` applied.
pub fn apply_gate(state: &StateVector, gate: Gate) -> Result<StateVector, SimError> {
    let mut s = state.clone();
    s.apply(gate)?;
    Ok(s)
}

/// Uniform superposition over the coset `s + shift`.
pub fn prepare_subspace_state(s: &Subspace, shift: &BitVector) -> Result<StateVector, SimError> {
    let n = s.ambient_dim();
    check_cap(n)?;
    if shift.len() != n {
        return Err(SimError::SizeMismatch(n, shift.len()));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
    let amp = Complex64::new((2f64).powi(-(s.dim() as i32)).sqrt(), 0.0);
    for e in s.elements() {
        amps[e.xor(shift).to_u64() as usize] = amp;
    }
    Ok(StateVector { num_qubits: n, amps })
}

/// Replaces `qubit` by `s.ambient_dim()` qubits via `|0⟩ → |S⟩`, `|1⟩ → |S+Δ⟩`.
pub fn apply_encoding_isometry(
    state: &StateVector,
    qubit: usize,
    s: &Subspace,
    delta: &BitVector,
) -> Result<StateVector, SimError> {
    state.check_qubit(qubit)?;
    let p = s.ambient_dim();
    let n = state.num_qubits;
    let new_n = n - 1 + p;
    check_cap(new_n)?;
    let after = n - 1 - qubit;
    let scale = (2f64).powi(-(s.dim() as i32)).sqrt();
    let codewords: [Vec<u64>; 2] = [
        s.elements().map(|e| e.to_u64()).collect(),
        s.elements().map(|e| e.xor(delta).to_u64()).collect(),
    ];
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << new_n];
    for (i, a) in state.amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let low = i & ((1usize << after) - 1);
        let bit = (i >> after) & 1;
        let high = i >> (after + 1);
        for &c in &codewords[bit] {
            let idx = (high << (p + after)) | ((c as usize) << after) | low;
            amps[idx] = a * scale;
        }
    }
    Ok(StateVector { num_qubits: new_n, amps })
}

/// `1 − |⟨a|b⟩|`, insensitive to global phase.
pub fn state_distance(a: &StateVector, b: &StateVector) -> Result<f64, SimError> {
    Ok(1.0 - a.inner(b)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_gates() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), Gate::H(0)).unwrap();
        assert!((plus.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((plus.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        let one = StateVector::basis_state(&"1".parse().unwrap()).unwrap();
        let t1 = apply_gate(&one, Gate::T(0)).unwrap();
        let expected = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((t1.amplitudes()[1] - expected).norm() < 1e-15);
    }

    #[test]
    fn cnot_on_10() {
        let s = StateVector::basis_state(&"10".parse().unwrap()).unwrap();
        let out = apply_gate(&s, Gate::Cnot(Cnot::new(0, 1))).unwrap();
        assert_eq!(out.amplitude(&"11".parse().unwrap()), c(1.0, 0.0));
        assert!(apply_gate(&s, Gate::Cnot(Cnot::new(1, 1))).is_err());
        assert!(apply_gate(&s, Gate::H(2)).is_err());
    }

    #[test]
    fn subspace_state_amplitudes() {
        let s = Subspace::span(2, &["11".parse().unwrap()]).unwrap();
        let st = prepare_subspace_state(&s, &BitVector::zeros(2)).unwrap();
        let h = FRAC_1_SQRT_2;
        let expect = [h, 0.0, 0.0, h];
        for (a, e) in st.amplitudes().iter().zip(expect) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
        let point = prepare_subspace_state(&Subspace::zero(3), &"101".parse().unwrap()).unwrap();
        assert_eq!(point, StateVector::basis_state(&"101".parse().unwrap()).unwrap());
    }

    #[test]
    fn encoding_isometry_middle_qubit() {
        // |0⟩|1⟩|0⟩ with the middle qubit encoded into span{11} + Δ=01.
        let s = Subspace::span(2, &["11".parse().unwrap()]).unwrap();
        let delta: BitVector = "01".parse().unwrap();
        let st = StateVector::basis_state(&"010".parse().unwrap()).unwrap();
        let enc = apply_encoding_isometry(&st, 1, &s, &delta).unwrap();
        assert_eq!(enc.num_qubits(), 4);
        let h = FRAC_1_SQRT_2;
        assert!((enc.amplitude(&"0010".parse().unwrap()) - c(h, 0.0)).norm() < 1e-15);
        assert!((enc.amplitude(&"0100".parse().unwrap()) - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn distance_and_phase() {
        let mut a = StateVector::zero(2).unwrap();
        a.apply(Gate::H(0)).unwrap();
        let mut b = a.clone();
        for amp in b.amplitudes_mut() {
            *amp *= Complex64::from_polar(1.0, 0.7);
        }
        assert!(state_distance(&a, &a).unwrap().abs() < 1e-15);
        assert!(state_distance(&a, &b).unwrap().abs() < 1e-15);
        let zero = StateVector::zero(1).unwrap();
        let one = StateVector::basis_state(&"1".parse().unwrap()).unwrap();
        assert!((state_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!(state_distance(&zero, &a).is_err());
    }

    #[test]
    fn take_qubit_requires_definite_value() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply(Gate::H(0)).unwrap();
        s.apply(Gate::X(1)).unwrap();
        s.apply(Gate::H(2)).unwrap();
        let (v, rest) = s.take_qubit(1, Basis::Z).unwrap();
        assert!(v);
        assert_eq!(rest.num_qubits(), 2);
        let (v2, _) = s.take_qubit(2, Basis::X).unwrap();
        assert!(!v2);
        assert!(s.take_qubit(0, Basis::Z).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(StateVector::zero(MAX_QUBITS + 1), Err(SimError::CapExceeded { .. })));
    }

    #[test]
    fn dump_format() {
        let s = StateVector::basis_state(&"10".parse().unwrap()).unwrap();
        let d = s.dump();
        assert_eq!(d.lines().count(), 1);
        assert!(d.starts_with("10 1.0"));
    }
}
