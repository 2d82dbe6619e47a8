use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::sim::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MagicKind {
    /// Two-qubit |φ_H⟩ ∝ |00⟩ + |01⟩ + |10⟩ − |11⟩.
    H,
    /// |φ_T⟩ ∝ |0⟩ + e^{iπ/4}|1⟩.
    T,
    /// |φ_PX⟩ ∝ i|0⟩ + |1⟩.
    PX,
}

pub fn magic_state(kind: MagicKind) -> StateVector {
    let amps = match kind {
        MagicKind::H => vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ],
        MagicKind::T => vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4),
        ],
        MagicKind::PX => vec![Complex64::new(0.0, FRAC_1_SQRT_2), Complex64::new(FRAC_1_SQRT_2, 0.0)],
    };
    StateVector::from_amplitudes(amps).expect("magic states are normalized")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes() {
        let h = magic_state(MagicKind::H);
        let expect = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in h.amplitudes().iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
        let t = magic_state(MagicKind::T);
        assert!((t.amplitudes()[1] - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        let px = magic_state(MagicKind::PX);
        assert!((px.amplitudes()[0] - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((px.amplitudes()[1] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }
}
