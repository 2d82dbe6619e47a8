#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use lmobf_core::auth::{
    enc, lin_eval, logical_measure_branches, pauli_update, AuthKey, BasisString, ComplexMatrix, TwirlInstance,
};
use lmobf_core::gf2::{sample_subspace, BitVector, Subspace};
use lmobf_core::sim::{
    branches, prepare_subspace_state, state_distance, Basis, Cnot, Gate, MeasurementSpec, StateVector,
};
use num_complex::Complex64;
use rand::Rng;

pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::from_unnormalized(amps).unwrap()
}

fn max_entry_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

/// Column b of E_{S,Δ}: the state |S + bΔ⟩.
fn encoder_column(s: &Subspace, delta: &BitVector, b: bool) -> StateVector {
    let shift = if b { delta.clone() } else { BitVector::zeros(delta.len()) };
    prepare_subspace_state(s, &shift).unwrap()
}

/// Largest entry of H^{⊗p} E_{Ŝ,Δ̂} − E_{S,Δ} H, as 2^p × 2 matrices.
pub fn hadamard_claim_deviation(k: &AuthKey) -> f64 {
    let p = k.p();
    let e0 = encoder_column(k.s(), k.delta(), false);
    let e1 = encoder_column(k.s(), k.delta(), true);
    let mut worst = 0.0f64;
    for b in [false, true] {
        let mut lhs = encoder_column(k.s_hat(), k.delta_hat(), b);
        for q in 0..p {
            lhs.apply(Gate::H(q)).unwrap();
        }
        // E H|b⟩ = (E|0⟩ + (−1)^b E|1⟩)/√2.
        let sign = if b { -1.0 } else { 1.0 };
        let rhs: Vec<Complex64> = e0
            .amplitudes()
            .iter()
            .zip(e1.amplitudes())
            .map(|(u, v)| (u + v * sign) * FRAC_1_SQRT_2)
            .collect();
        worst = worst.max(max_entry_deviation(lhs.amplitudes(), &rhs));
    }
    worst
}

/// Largest entry of CNOT^{⊗p}(E⊗E) − (E⊗E)CNOT and of the keyed version
/// CNOT^{⊗p} Enc_k − Enc_{k_L} CNOT, column by column over the 4 basis inputs.
/// `k` must have n = 2.
pub fn linear_claim_deviation(k: &AuthKey) -> f64 {
    assert_eq!(k.n(), 2);
    let p = k.p();
    let l = [Cnot::new(0, 1)];
    let zeros = vec![BitVector::zeros(p); 2];
    let bare = AuthKey::from_parts(k.lambda(), k.s().clone(), k.delta().clone(), zeros.clone(), zeros).unwrap();
    let (xl, zl) = pauli_update(&l, k.x(), k.z());
    let updated = AuthKey::from_parts(k.lambda(), k.s().clone(), k.delta().clone(), xl, zl).unwrap();
    let mut worst = 0.0f64;
    for v in 0..4u64 {
        let basis = StateVector::basis_state(&BitVector::from_u64(v, 2)).unwrap();
        let mut after = basis.clone();
        after.apply(Gate::Cnot(l[0])).unwrap();
        for (before_key, after_key) in [(&bare, &bare), (k, &updated)] {
            let lhs = lin_eval(&l, &enc(before_key, &basis).unwrap(), p).unwrap();
            let rhs = enc(after_key, &after).unwrap();
            worst = worst.max(max_entry_deviation(lhs.amplitudes(), rhs.amplitudes()));
        }
    }
    worst
}

pub fn random_cnots<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Vec<Cnot> {
    (0..len)
        .map(|_| {
            let a = rng.gen_range(0..n);
            Cnot::new(a, (a + rng.gen_range(1..n)) % n)
        })
        .collect()
}

pub fn random_theta<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BasisString {
    BasisString::new(
        (0..n)
            .map(|_| match rng.gen_range(0..3) {
                0 => None,
                1 => Some(Basis::Z),
                _ => Some(Basis::X),
            })
            .collect(),
    )
}

fn table_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | usize::from(b))
}

/// Runs both orders of the correctness diagram and returns the largest
/// probability gap or post-state distance:
/// encode, apply L transversally, measure authenticated; versus apply L,
/// measure the plain state, encode the post-state under the updated keys.
pub fn commuting_diagram_deviation(
    k: &AuthKey,
    l: &[Cnot],
    theta: &BasisString,
    table: &[u8],
    psi: &StateVector,
) -> f64 {
    let p = k.p();
    let f = |m: &[bool]| table[table_index(m)];

    let encoded = lin_eval(l, &enc(k, psi).unwrap(), p).unwrap();
    let auth_side = logical_measure_branches(k, l, theta, f, &encoded).unwrap();

    let mut plain = psi.clone();
    for c in l {
        plain.apply(Gate::Cnot(*c)).unwrap();
    }
    let spec = MeasurementSpec::new(theta.as_slice().to_vec(), |bits: &BitVector| f(&bits.to_bits()));
    let plain_side = branches(&plain, &spec).unwrap();
    let (xl, zl) = pauli_update(l, k.x(), k.z());
    let k_l = AuthKey::from_parts(k.lambda(), k.s().clone(), k.delta().clone(), xl, zl).unwrap();

    let mut by_outcome: BTreeMap<u8, (f64, Option<StateVector>)> = BTreeMap::new();
    for b in &plain_side {
        by_outcome.insert(b.outcome, (b.probability, Some(enc(&k_l, &b.post_state).unwrap())));
    }
    let mut worst = 0.0f64;
    for b in &auth_side {
        let Some(y) = b.outcome else {
            // An honest run never decodes to ⊥.
            return f64::INFINITY;
        };
        let (prob, post) = by_outcome.remove(&y).unwrap_or((0.0, None));
        worst = worst.max((prob - b.probability).abs());
        if let Some(post) = post {
            worst = worst.max(state_distance(&post, &b.post_state).unwrap());
        }
    }
    for (prob, _) in by_outcome.values() {
        worst = worst.max(*prob);
    }
    worst
}

fn vector_outside<R: Rng + ?Sized>(s: &Subspace, rng: &mut R) -> BitVector {
    loop {
        let v = BitVector::random(s.ambient_dim(), rng);
        if !s.contains(&v) {
            return v;
        }
    }
}

/// A random instance satisfying the twirl lemma's hypotheses at ambient
/// dimension `n ≥ 2`. R is nonzero so that R^⊥ is proper.
pub fn valid_twirl_instance<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TwirlInstance {
    assert!(n >= 2);
    let r = sample_subspace(n, rng.gen_range(1..n), rng).unwrap();
    let r_hat = sample_subspace(n, rng.gen_range(0..n), rng).unwrap();
    let delta = vector_outside(&r, rng);
    let delta_hat = vector_outside(&r_hat, rng);
    loop {
        let inst = TwirlInstance {
            r: r.clone(),
            r_hat: r_hat.clone(),
            delta: delta.clone(),
            delta_hat: delta_hat.clone(),
            x0: BitVector::random(n, rng),
            z0: BitVector::random(n, rng),
            x1: BitVector::random(n, rng),
            z1: BitVector::random(n, rng),
        };
        if inst.precondition_holds() {
            return inst;
        }
    }
}

/// A random mixed state on `m` qubits.
pub fn random_density<R: Rng + ?Sized>(m: usize, rng: &mut R) -> ComplexMatrix {
    let parts: Vec<(f64, StateVector)> = (0..3).map(|_| (rng.gen_range(0.0..1.0), random_state(m, rng))).collect();
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    let parts: Vec<_> = parts.into_iter().map(|(w, s)| (w / total, s)).collect();
    ComplexMatrix::mixture(&parts)
}

/// Standard deviation of the empirical rate of `trials` Bernoulli(p) draws.
pub fn sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
