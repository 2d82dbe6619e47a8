use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use lmobf_core::gf2::{sample_subspace, BitVector};
use lmobf_core::sim::{
    branches, outcome_probabilities, prepare_subspace_state, state_distance, Basis, Cnot, Gate, MeasurementSpec,
    StateVector, WireRegister,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn identity(d: usize) -> Matrix {
    (0..d).map(|i| (0..d).map(|j| c(f64::from(u8::from(i == j)), 0.0)).collect()).collect()
}

/// Full 2^n × 2^n matrix of a gate, built from Kronecker products with qubit 0 leftmost.
fn gate_matrix(n: usize, g: Gate) -> Matrix {
    let h = vec![vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]];
    let t = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), Complex64::from_polar(1.0, FRAC_PI_4)]];
    let x = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    let z = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]];
    let id2 = identity(2);
    let single = |q: usize, m: &Matrix| {
        let mut out = identity(1);
        for k in 0..n {
            out = kron(&out, if k == q { m } else { &id2 });
        }
        out
    };
    match g {
        Gate::H(q) => single(q, &h),
        Gate::T(q) => single(q, &t),
        Gate::X(q) => single(q, &x),
        Gate::Z(q) => single(q, &z),
        Gate::Cnot(cn) => {
            let p0 = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
            let p1 = vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
            let mut a = identity(1);
            let mut b = identity(1);
            for k in 0..n {
                a = kron(&a, if k == cn.control { &p0 } else { &id2 });
                b = kron(&b, if k == cn.control { &p1 } else if k == cn.target { &x } else { &id2 });
            }
            a.iter().zip(&b).map(|(ra, rb)| ra.iter().zip(rb).map(|(u, v)| u + v).collect()).collect()
        }
    }
}

fn mat_vec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn random_gate<R: Rng>(n: usize, rng: &mut R) -> Gate {
    let q = rng.gen_range(0..n);
    match rng.gen_range(0..if n > 1 { 5 } else { 4 }) {
        0 => Gate::H(q),
        1 => Gate::T(q),
        2 => Gate::X(q),
        3 => Gate::Z(q),
        _ => Gate::Cnot(Cnot::new(q, (q + rng.gen_range(1..n)) % n)),
    }
}

fn random_state<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let amps = (0..1usize << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    StateVector::from_unnormalized(amps).unwrap()
}

proptest! {
    #[test]
    fn gates_match_matrix_products(seed in any::<u64>(), n in 1usize..=4, len in 0usize..12) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut st = random_state(n, &mut rng);
        let mut want = st.amplitudes().to_vec();
        for _ in 0..len {
            let g = random_gate(n, &mut rng);
            st.apply(g).unwrap();
            want = mat_vec(&gate_matrix(n, g), &want);
        }
        for (a, b) in st.amplitudes().iter().zip(&want) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_maps_subspace_state_to_dual(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let d = rng.gen_range(0..=n);
        let s = sample_subspace(n, d, &mut rng).unwrap();
        let mut st = prepare_subspace_state(&s, &BitVector::zeros(n)).unwrap();
        for q in 0..n {
            st.apply(Gate::H(q)).unwrap();
        }
        let want = prepare_subspace_state(&s.dual(), &BitVector::zeros(n)).unwrap();
        prop_assert!(state_distance(&st, &want).unwrap() <= 1e-12);
    }

    #[test]
    fn outcome_probabilities_are_marginals(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let st = random_state(n, &mut rng);
        let bases: Vec<Option<Basis>> = (0..n).map(|_| rng.gen_bool(0.6).then_some(Basis::Z)).collect();
        let measured: Vec<usize> = (0..n).filter(|&q| bases[q].is_some()).collect();
        let spec = MeasurementSpec::identity(bases);
        let got = outcome_probabilities(&st, &spec).unwrap();
        let mut want: BTreeMap<BitVector, f64> = BTreeMap::new();
        for (i, a) in st.amplitudes().iter().enumerate() {
            let bits = BitVector::from_u64(i as u64, n);
            let key = BitVector::from_bits(&measured.iter().map(|&q| bits.get(q)).collect::<Vec<_>>());
            *want.entry(key).or_default() += a.norm_sqr();
        }
        for (k, p) in &want {
            prop_assert!((got.get(k).copied().unwrap_or(0.0) - p).abs() < 1e-12);
        }
        let total: f64 = got.values().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_are_orthogonal_projections(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let st = random_state(n, &mut rng);
        let bases: Vec<Option<Basis>> = (0..n)
            .map(|_| match rng.gen_range(0..3) {
                0 => None,
                1 => Some(Basis::Z),
                _ => Some(Basis::X),
            })
            .collect();
        // Coarse-grained outcome: parity of the readout.
        let spec = MeasurementSpec::new(bases, |b: &BitVector| b.count_ones() % 2);
        let bs = branches(&st, &spec).unwrap();
        let total: f64 = bs.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let mut recombined = vec![c(0.0, 0.0); 1 << n];
        for b in &bs {
            prop_assert!((b.post_state.norm_sqr() - 1.0).abs() < 1e-12);
            let overlap = st.inner(&b.post_state).unwrap();
            prop_assert!((overlap.norm_sqr() - b.probability).abs() < 1e-12);
            for (r, a) in recombined.iter_mut().zip(b.post_state.amplitudes()) {
                *r += a * b.probability.sqrt();
            }
            for other in &bs {
                if other.outcome != b.outcome {
                    prop_assert!(b.post_state.inner(&other.post_state).unwrap().norm() < 1e-12);
                }
            }
        }
        // Σ_y Π_y ψ = ψ.
        for (r, a) in recombined.iter().zip(st.amplitudes()) {
            prop_assert!((r - a).norm() < 1e-12);
        }
    }

    #[test]
    fn wire_register_agrees_with_dense(seed in any::<u64>(), n in 1usize..=5, len in 0usize..10) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let singles: Vec<StateVector> = (0..n).map(|_| random_state(1, &mut rng)).collect();
        let mut dense = StateVector::zero(0).unwrap();
        for s in &singles {
            dense = dense.tensor(s).unwrap();
        }
        let mut reg = WireRegister::from_product(singles).unwrap();
        for _ in 0..len {
            let g = random_gate(n, &mut rng);
            dense.apply(g).unwrap();
            reg.apply(g).unwrap();
        }
        let map: Vec<usize> = (0..n).map(|w| reg.ensure_live(w).unwrap()).collect();
        let live = reg.live_state();
        for (i, a) in dense.amplitudes().iter().enumerate() {
            let bits = BitVector::from_u64(i as u64, n);
            let mut live_bits = BitVector::zeros(n);
            for (w, &q) in map.iter().enumerate() {
                live_bits.set(q, bits.get(w));
            }
            prop_assert!((live.amplitude(&live_bits) - a).norm() < 1e-12);
        }
    }
}

#[test]
fn freeze_round_trips_definite_wires() {
    let zero = StateVector::zero(1).unwrap();
    let mut reg = WireRegister::from_product(vec![zero.clone(), zero.clone(), zero]).unwrap();
    reg.apply(Gate::X(0)).unwrap();
    reg.apply(Gate::Cnot(Cnot::new(0, 2))).unwrap();
    reg.apply(Gate::H(1)).unwrap();
    assert!(reg.freeze(0, Basis::Z).unwrap());
    assert!(!reg.freeze(1, Basis::X).unwrap());
    assert_eq!(reg.frozen(1), Some((Basis::X, false)));
    reg.apply(Gate::Cnot(Cnot::new(0, 2))).unwrap();
    assert!(!reg.freeze(2, Basis::Z).unwrap());
    assert_eq!(reg.live_state().num_qubits(), 1);

    let mut plus = WireRegister::from_product(vec![StateVector::zero(1).unwrap()]).unwrap();
    plus.apply(Gate::H(0)).unwrap();
    assert!(plus.freeze(0, Basis::Z).is_err());
}
