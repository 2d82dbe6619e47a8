use std::ops::Mul;

use num_complex::Complex64;

use crate::gf2::{BitVector, Subspace};
use crate::sim::StateVector;

use super::AuthError;

/// Largest register the twirl check will build matrices for.
pub const MAX_TWIRL_QUBITS: usize = 5;

/// Small dense complex square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    fn at(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let mut m = Self::zeros(a.len());
        for r in 0..a.len() {
            for c in 0..a.len() {
                *m.at(r, c) = a[r] * a[c].conj();
            }
        }
        m
    }

    /// Σ_k w_k |ψ_k⟩⟨ψ_k|.
    pub fn mixture(parts: &[(f64, StateVector)]) -> Self {
        let dim = parts.first().map_or(1, |(_, s)| s.amplitudes().len());
        let mut m = Self::zeros(dim);
        for (w, s) in parts {
            m.add_assign(&Self::projector(s).scaled(*w));
        }
        m
    }

    /// X^x Z^z on the leading `x.len()` of `num_qubits` qubits.
    pub fn pauli_xz(num_qubits: usize, x: &BitVector, z: &BitVector) -> Self {
        let dim = 1usize << num_qubits;
        let shift = num_qubits - x.len();
        let xm = (x.to_u64() as usize) << shift;
        let zm = (z.to_u64() as usize) << shift;
        let mut m = Self::zeros(dim);
        for b in 0..dim {
            let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            *m.at(b ^ xm, b) = Complex64::new(sign, 0.0);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                *m.at(c, r) = self.get(r, c).conj();
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

/// One instance of the twirl sum.
#[derive(Clone, Debug)]
pub struct TwirlInstance {
    pub r: Subspace,
    pub r_hat: Subspace,
    pub delta: BitVector,
    pub delta_hat: BitVector,
    pub x0: BitVector,
    pub z0: BitVector,
    pub x1: BitVector,
    pub z1: BitVector,
}

impl TwirlInstance {
    /// Whether the cross terms are supposed to cancel.
    pub fn precondition_holds(&self) -> bool {
        !self.r_hat.dual().contains(&self.x0.xor(&self.x1)) || !self.r.dual().contains(&self.z0.xor(&self.z1))
    }

    fn check_shapes(&self, rho: &ComplexMatrix) -> Result<usize, AuthError> {
        let n = self.r.ambient_dim();
        let vs = [&self.delta, &self.delta_hat, &self.x0, &self.z0, &self.x1, &self.z1];
        if self.r_hat.ambient_dim() != n || vs.iter().any(|v| v.len() != n) {
            return Err(AuthError::Shape("twirl vectors and subspaces must share one ambient dimension".into()));
        }
        let m = rho.dim().trailing_zeros() as usize;
        if !rho.dim().is_power_of_two() || m < n || m > MAX_TWIRL_QUBITS {
            return Err(AuthError::Shape(format!(
                "ρ must act on between {n} and {MAX_TWIRL_QUBITS} qubits"
            )));
        }
        Ok(m)
    }
}

/// Σ_{x∈R+Δ, z∈R̂+Δ̂} (Z^z X^x)(X^{x0}Z^{z0})(X^x Z^z) ρ (Z^z X^x)(Z^{z1}X^{x1})(X^x Z^z),
/// computed by direct matrix products. No precondition is checked.
pub fn twirled_sum(inst: &TwirlInstance, rho: &ComplexMatrix) -> Result<ComplexMatrix, AuthError> {
    let m = inst.check_shapes(rho)?;
    let left_p = ComplexMatrix::pauli_xz(m, &inst.x0, &inst.z0);
    // Z^{z1} X^{x1} = (X^{x1} Z^{z1})†.
    let right_p = ComplexMatrix::pauli_xz(m, &inst.x1, &inst.z1).adjoint();
    let mut total = ComplexMatrix::zeros(rho.dim());
    for xr in inst.r.elements() {
        let x = xr.xor(&inst.delta);
        for zr in inst.r_hat.elements() {
            let z = zr.xor(&inst.delta_hat);
            let xz = ComplexMatrix::pauli_xz(m, &x, &z);
            let zx = xz.adjoint();
            let left = &(&zx * &left_p) * &xz;
            let right = &(&zx * &right_p) * &xz;
            total.add_assign(&(&(&left * rho) * &right));
        }
    }
    Ok(total)
}

/// Checks the precondition, then returns the largest entry of the twirled sum.
pub fn verify_pauli_twirl(inst: &TwirlInstance, rho: &ComplexMatrix) -> Result<f64, AuthError> {
    if inst.r.contains(&inst.delta) || inst.r_hat.contains(&inst.delta_hat) {
        return Err(AuthError::Precondition("Δ ∈ R or Δ̂ ∈ R̂".into()));
    }
    if !inst.precondition_holds() {
        return Err(AuthError::Precondition(
            "x0 ⊕ x1 ∈ R̂^⊥ and z0 ⊕ z1 ∈ R^⊥".into(),
        ));
    }
    Ok(twirled_sum(inst, rho)?.max_abs())
}
