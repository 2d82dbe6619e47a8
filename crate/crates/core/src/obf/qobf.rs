use rand::Rng;

use crate::auth::{gen, EncodedRegister};
use crate::gf2::BitVector;
use crate::lm::{check_lm_invariants, LmProgram, StateTag};
use crate::sim::{BasisString, Cnot};
use crate::token::{tok_gen, tok_sign, SigningKey};

use super::encoding::{OracleQuery, OracleResponse};
use super::oracle::{OracleKey, OracleSet};
use super::params::ObfParams;
use super::prf::PrfKey;
use super::ObfError;

/// The public structure of one layer; its classical function stays in the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerShape {
    pub linear: Vec<Cnot>,
    pub theta: BasisString,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

/// What the evaluator knows about the program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramShape {
    pub num_inputs: usize,
    pub num_wires: usize,
    /// The t measurement layers followed by the final layer (with empty `w`).
    pub layers: Vec<LayerShape>,
}

impl ProgramShape {
    pub fn of(p: &LmProgram) -> Self {
        let mut layers: Vec<LayerShape> = p
            .layers
            .iter()
            .map(|l| LayerShape { linear: l.linear.clone(), theta: l.theta.clone(), v: l.v.clone(), w: l.w.clone() })
            .collect();
        layers.push(LayerShape {
            linear: p.final_layer.linear.clone(),
            theta: p.final_layer.theta.clone(),
            v: p.final_layer.v.clone(),
            w: Vec::new(),
        });
        Self { num_inputs: p.num_inputs, num_wires: p.num_wires(), layers }
    }

    pub fn t(&self) -> usize {
        self.layers.len() - 1
    }

    /// Wires read at layer `i`: V_0..V_i, then W_i.
    pub fn phi_wires(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.layers[..=i].iter().flat_map(|l| l.v.iter().copied()).collect();
        out.extend(&self.layers[i].w);
        out
    }
}

/// The obfuscated state |ψ_k⟩|sk⟩ with the public program structure.
#[derive(Clone, Debug)]
pub struct ObfuscatedProgram {
    shape: ProgramShape,
    register: EncodedRegister,
    sk: SigningKey,
}

impl ObfuscatedProgram {
    pub fn shape(&self) -> &ProgramShape {
        &self.shape
    }

    pub fn register(&self) -> &EncodedRegister {
        &self.register
    }

    /// Direct access to the encoded register, for fault injection.
    pub fn register_mut(&mut self) -> &mut EncodedRegister {
        &mut self.register
    }

    pub fn signing_key(&self) -> &SigningKey {
        &self.sk
    }

    pub fn signing_key_mut(&mut self) -> &mut SigningKey {
        &mut self.sk
    }

    pub fn is_physical(&self) -> bool {
        matches!(self.register, EncodedRegister::Physical { .. })
    }

    /// n·p register qubits plus 2κ′ per token bit.
    pub fn num_qubits(&self, p: usize) -> usize {
        self.shape.num_wires * p + self.sk.num_qubits()
    }
}

/// Samples keys, encodes the program's initial state and packages the oracle key.
pub fn qobf<R: Rng + ?Sized>(
    params: &ObfParams,
    program: &LmProgram,
    rng: &mut R,
) -> Result<(ObfuscatedProgram, OracleKey), ObfError> {
    params.validate()?;
    if let Some(w) = program.state.iter().position(|t| matches!(t, StateTag::InputBit(_))) {
        return Err(ObfError::InvalidProgram(format!(
            "wire {w} depends on the input; obfuscated programs must carry x classically"
        )));
    }
    let report = check_lm_invariants(program);
    if !report.is_ok() {
        return Err(ObfError::InvalidProgram(report.to_string()));
    }
    let n = program.num_wires();
    let physical = params.physical(n)?;
    let auth = gen(params.lambda, n, rng)?;
    let (vk, sk) = tok_gen(params.kappa_prime, program.num_inputs, params.backend(), rng)?;
    let prf = PrfKey::random(rng);
    let register = if physical {
        EncodedRegister::physical(&auth, &program.initial_state(None)?)?
    } else {
        EncodedRegister::logical(&auth, program.initial_factors(None)?)?
    };
    let key = OracleKey { auth, vk, prf, program: program.clone(), kappa: params.effective_kappa(n) };
    Ok((ObfuscatedProgram { shape: ProgramShape::of(program), register, sk }, key))
}

/// Runs the obfuscated program on `x`. Consumes the signing key.
pub fn qeval<R: Rng + ?Sized>(
    x: &BitVector,
    obf: &mut ObfuscatedProgram,
    oracles: &dyn OracleSet,
    rng: &mut R,
) -> Result<BitVector, ObfError> {
    let shape = obf.shape.clone();
    if x.len() != shape.num_inputs {
        return Err(ObfError::InputLength { expected: shape.num_inputs, found: x.len() });
    }
    if oracles.num_layers() != shape.t() {
        return Err(ObfError::Protocol(format!(
            "oracle set has {} layers, program has {}",
            oracles.num_layers(),
            shape.t()
        )));
    }
    let sigma = tok_sign(x, &mut obf.sk, rng)?;
    let mut labels: Vec<BitVector> = Vec::with_capacity(shape.t());

    for (i, layer) in shape.layers.iter().enumerate() {
        let last = i == shape.t();
        obf.register.lin_eval(&layer.linear)?;
        let x_blocks = layer.theta.phi_x();
        obf.register.hadamard_blocks(&x_blocks)?;

        let blocks = shape.phi_wires(i);
        let v_count = blocks.len() - layer.w.len();
        let collapse: Vec<bool> = (0..blocks.len()).map(|k| k < v_count).collect();
        let sizes: Vec<usize> = shape.layers[..=i].iter().map(|l| l.v.len()).collect();
        let ask = |readouts: &[BitVector]| {
            let mut v_tilde = Vec::with_capacity(sizes.len());
            let mut at = 0;
            for &s in &sizes {
                v_tilde.push(readouts[at..at + s].to_vec());
                at += s;
            }
            let q = OracleQuery {
                x: x.clone(),
                sigma: sigma.clone(),
                v_tilde,
                w_tilde: readouts[at..].to_vec(),
                labels: labels.clone(),
            };
            oracles.query(i, &q)
        };
        let resp = obf.register.query(&blocks, &collapse, ask, rng)?;
        obf.register.hadamard_blocks(&x_blocks)?;

        match resp {
            OracleResponse::Bot(reason) => return Err(ObfError::Rejected { layer: i, reason }),
            OracleResponse::Layer { label, .. } if !last => labels.push(label),
            OracleResponse::Output(y) if last => return Ok(y),
            other => return Err(ObfError::Protocol(format!("unexpected response {other:?} at layer {i}"))),
        }
    }
    unreachable!("the final layer always returns")
}
