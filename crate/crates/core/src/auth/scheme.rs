use rand::Rng;

use crate::gf2::{coset_decode, BitVector};
use crate::sim::{self, apply_encoding_isometry, Basis, BasisString, Branch, Cnot, Gate, MeasurementSpec, StateVector};

use super::{AuthError, AuthKey};

/// Classical readout of the measured blocks, one length-p vector per wire of
/// Φ in ascending wire order.
pub type CodewordTuple = Vec<BitVector>;

/// Applies the CNOT update rule for each gate of `l` in order.
pub fn pauli_update(l: &[Cnot], x: &[BitVector], z: &[BitVector]) -> (Vec<BitVector>, Vec<BitVector>) {
    let mut x = x.to_vec();
    let mut z = z.to_vec();
    for c in l {
        let (i, j) = (c.control, c.target);
        let zj = z[j].clone();
        z[i].xor_assign(&zj);
        let xi = x[i].clone();
        x[j].xor_assign(&xi);
    }
    (x, z)
}

/// The inverse of a CNOT list.
pub fn invert_linear(l: &[Cnot]) -> Vec<Cnot> {
    l.iter().rev().copied().collect()
}

/// Enc_k = X^x Z^z E_{S,Δ}^{⊗n}, block i occupying qubits `i·p .. (i+1)·p`.
pub fn enc(k: &AuthKey, logical: &StateVector) -> Result<StateVector, AuthError> {
    let n = k.n();
    if logical.num_qubits() != n {
        return Err(AuthError::Shape(format!("{n}-wire key for a {}-qubit state", logical.num_qubits())));
    }
    let mut st = logical.clone();
    for i in (0..n).rev() {
        st = apply_encoding_isometry(&st, i, k.s(), k.delta())?;
    }
    let p = k.p();
    for i in 0..n {
        st.apply_pauli(i * p, &k.x()[i], &k.z()[i])?;
    }
    Ok(st)
}

/// Applies each logical CNOT of `l` transversally between code blocks.
pub fn lin_eval(l: &[Cnot], state: &StateVector, p: usize) -> Result<StateVector, AuthError> {
    let mut st = state.clone();
    for c in l {
        for q in 0..p {
            st.apply(Gate::Cnot(Cnot::new(c.control * p + q, c.target * p + q)))?;
        }
    }
    Ok(st)
}

/// Decodes one block read in `basis` against its current Pauli keys.
pub fn decode_block(k: &AuthKey, x_l: &BitVector, z_l: &BitVector, basis: Basis, c: &BitVector) -> Option<bool> {
    if c.len() != k.p() {
        return None;
    }
    match basis {
        Basis::Z => coset_decode(k.s(), k.delta(), x_l, c),
        Basis::X => coset_decode(k.s_hat(), k.delta_hat(), z_l, c),
    }
}

fn decode_with(
    k: &AuthKey,
    x_l: &[BitVector],
    z_l: &[BitVector],
    theta: &BasisString,
    c: &[BitVector],
) -> Option<Vec<bool>> {
    let phi = theta.phi();
    if phi.len() != c.len() {
        return None;
    }
    phi.iter()
        .zip(c)
        .map(|(&i, ci)| decode_block(k, &x_l[i], &z_l[i], theta.get(i).expect("in Φ"), ci))
        .collect()
}

/// Decodes the logical bits of the wires measured by `theta` after `l`.
pub fn dec(k: &AuthKey, l: &[Cnot], theta: &BasisString, c: &[BitVector]) -> Option<Vec<bool>> {
    if theta.len() != k.n() {
        return None;
    }
    let (x_l, z_l) = pauli_update(l, k.x(), k.z());
    decode_with(k, &x_l, &z_l, theta, c)
}

pub fn ver(k: &AuthKey, l: &[Cnot], theta: &BasisString, c: &[BitVector]) -> bool {
    dec(k, l, theta, c).is_some()
}

/// Result of a sampled authenticated measurement. `outcome == None` is ⊥.
#[derive(Clone, Debug)]
pub struct AuthMeasurement<O> {
    pub outcome: Option<O>,
    pub codewords: CodewordTuple,
    pub post_state: StateVector,
}

fn auth_spec<'a, O, F>(
    k: &'a AuthKey,
    l: &[Cnot],
    theta: &'a BasisString,
    f: F,
    num_qubits: usize,
) -> Result<MeasurementSpec<'a, Option<O>>, AuthError>
where
    F: Fn(&[bool]) -> O + 'a,
{
    let p = k.p();
    if theta.len() != k.n() || num_qubits != k.n() * p {
        return Err(AuthError::Shape(format!(
            "state of {num_qubits} qubits does not match {} blocks of {p}",
            theta.len()
        )));
    }
    let (x_l, z_l) = pauli_update(l, k.x(), k.z());
    let bases = theta.blown_up(p).as_slice().to_vec();
    Ok(MeasurementSpec::new(bases, move |bits: &BitVector| {
        let c = split_blocks(bits, p);
        decode_with(k, &x_l, &z_l, theta, &c).map(|m| f(&m))
    }))
}

/// Splits a concatenated readout into consecutive length-p blocks.
pub fn split_blocks(bits: &BitVector, p: usize) -> Vec<BitVector> {
    (0..bits.len() / p).map(|b| bits.slice(b * p, (b + 1) * p)).collect()
}

/// The measurement M̃_{θ,f,k,L} on an n·p-qubit state: blocks of Φ_X are
/// read after transversal Hadamards, decoded, and passed to `f`.
pub fn logical_measure<O, F, R>(
    k: &AuthKey,
    l: &[Cnot],
    theta: &BasisString,
    f: F,
    state: &StateVector,
    rng: &mut R,
) -> Result<AuthMeasurement<O>, AuthError>
where
    O: Ord + Clone,
    F: Fn(&[bool]) -> O,
    R: Rng + ?Sized,
{
    let spec = auth_spec(k, l, theta, f, state.num_qubits())?;
    let res = sim::measure(state, &spec, rng)?;
    Ok(AuthMeasurement {
        outcome: res.outcome,
        codewords: split_blocks(&res.raw_bits, k.p()),
        post_state: res.post_state,
    })
}

/// Every branch of [`logical_measure`], the ⊥ branch included when it has weight.
pub fn logical_measure_branches<O, F>(
    k: &AuthKey,
    l: &[Cnot],
    theta: &BasisString,
    f: F,
    state: &StateVector,
) -> Result<Vec<Branch<Option<O>>>, AuthError>
where
    O: Ord + Clone,
    F: Fn(&[bool]) -> O,
{
    let spec = auth_spec(k, l, theta, f, state.num_qubits())?;
    Ok(sim::branches(state, &spec)?)
}
