use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::auth::{decode_block, pauli_update, AuthKey};
use crate::gf2::BitVector;
use crate::lm::{output_var, BoundFn, LmProgram};
use crate::token::{tok_ver, VerificationKey};

use super::encoding::{BotReason, OracleQuery, OracleResponse};
use super::prf::PrfKey;
use super::ObfError;

/// Everything the oracles need: auth key, token vk, PRF key, the program's
/// classical part and the label length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleKey {
    pub auth: AuthKey,
    pub vk: VerificationKey,
    pub prf: PrfKey,
    pub program: LmProgram,
    pub kappa: usize,
}

impl fmt::Display for OracleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "oracle-key")?;
        writeln!(f, "kappa {}", self.kappa)?;
        writeln!(f, "prf {}", self.prf)?;
        write!(f, "{}", self.auth)?;
        write!(f, "{}", self.vk)?;
        write!(f, "{}", self.program)
    }
}

fn header_value<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str, ObfError> {
    let line = line.ok_or_else(|| ObfError::Parse(format!("missing `{key}`")))?;
    match line.trim().split_once(' ') {
        Some((k, v)) if k == key => Ok(v.trim()),
        _ => Err(ObfError::Parse(format!("expected `{key}`, found {line:?}"))),
    }
}

impl FromStr for OracleKey {
    type Err = ObfError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let lines: Vec<&str> = text.lines().collect();
        let mut it = lines.iter().copied().filter(|l| !l.trim().is_empty());
        if it.next().map(str::trim) != Some("oracle-key") {
            return Err(ObfError::Parse("missing `oracle-key` header".into()));
        }
        let kappa = header_value(it.next(), "kappa")?
            .parse()
            .map_err(|_| ObfError::Parse("bad kappa".into()))?;
        let prf = header_value(it.next(), "prf")?.parse()?;
        let find = |head: &str| {
            lines
                .iter()
                .position(|l| l.trim() == head)
                .ok_or_else(|| ObfError::Parse(format!("missing `{head}` section")))
        };
        let (a, v, p) = (find("auth-key")?, find("token-vk")?, find("lm-program")?);
        if !(a < v && v < p) {
            return Err(ObfError::Parse("sections out of order".into()));
        }
        let auth: AuthKey = lines[a..v].join("\n").parse()?;
        let vk: VerificationKey = lines[v..p].join("\n").parse()?;
        let program: LmProgram = lines[p..].join("\n").parse()?;
        if auth.n() != program.num_wires() || vk.num_bits() != program.num_inputs {
            return Err(ObfError::Parse("key sizes disagree with the program".into()));
        }
        Ok(Self { auth, vk, prf, program, kappa })
    }
}

/// Which oracle family answers queries.
#[derive(Clone)]
pub enum OracleMode {
    /// F_1..F_t and G.
    Real,
    /// FSim_1..FSim_t and GSim with access to the induced map Q.
    Simulated(Arc<dyn Fn(&BitVector) -> BitVector + Send + Sync>),
}

impl fmt::Debug for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleMode::Real => f.write_str("Real"),
            OracleMode::Simulated(_) => f.write_str("Simulated"),
        }
    }
}

/// Oracle access as seen by the evaluator: layer `i < t` is F_i, `i == t` is G.
pub trait OracleSet {
    fn num_layers(&self) -> usize;
    fn query(&self, i: usize, q: &OracleQuery) -> OracleResponse;
}

/// Test instrumentation recording every emitted label's message and every
/// accepted incoming label.
#[derive(Debug, Default)]
pub struct EmissionLog {
    emitted: HashSet<(usize, Vec<u8>)>,
    accepted: usize,
    unmatched: usize,
}

impl EmissionLog {
    pub fn emitted(&self) -> usize {
        self.emitted.len()
    }

    /// Incoming labels that passed the chain check.
    pub fn accepted(&self) -> usize {
        self.accepted
    }

    /// Accepted labels never emitted for the same layer and prefix.
    pub fn unmatched(&self) -> usize {
        self.unmatched
    }
}

/// In-process oracles backed by an [`OracleKey`].
#[derive(Debug)]
pub struct Oracles {
    key: OracleKey,
    frames: Vec<(Vec<BitVector>, Vec<BitVector>)>,
    functions: Vec<BoundFn>,
    output_slots: Vec<usize>,
    mode: OracleMode,
    diagnostic: bool,
    log: Option<Mutex<EmissionLog>>,
}

impl Oracles {
    /// Adversarial-mode oracles: refusals are a bare ⊥.
    pub fn new(key: OracleKey, mode: OracleMode) -> Result<Self, ObfError> {
        let prog = &key.program;
        let t = prog.t();
        let mut frames = Vec::with_capacity(t + 1);
        let (mut x, mut z) = (key.auth.x().to_vec(), key.auth.z().to_vec());
        for i in 0..=t {
            (x, z) = pauli_update(prog.linear(i), &x, &z);
            frames.push((x.clone(), z.clone()));
        }
        let functions = (0..=t).map(|i| prog.bind_function(i)).collect::<Result<Vec<_>, _>>()?;
        let names = prog.final_layer.g.output_names();
        let output_slots = (0..prog.num_outputs)
            .map(|k| {
                let want = output_var(k);
                names
                    .iter()
                    .position(|n| *n == want)
                    .ok_or_else(|| ObfError::InvalidProgram(format!("g lacks output {want}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { key, frames, functions, output_slots, mode, diagnostic: false, log: None })
    }

    /// Reports ⊥ reasons instead of a bare ⊥.
    pub fn diagnostic(mut self) -> Self {
        self.diagnostic = true;
        self
    }

    /// Records label emissions and chain acceptances.
    pub fn with_log(mut self) -> Self {
        self.log = Some(Mutex::new(EmissionLog::default()));
        self
    }

    pub fn key(&self) -> &OracleKey {
        &self.key
    }

    pub fn log(&self) -> Option<std::sync::MutexGuard<'_, EmissionLog>> {
        self.log.as_ref().map(|l| l.lock().expect("log lock"))
    }

    fn label(&self, q: &OracleQuery, i: usize, r: bool) -> (Vec<u8>, BitVector) {
        let msg = q.label_message(i, r);
        let l = self.key.prf.eval(&msg, self.key.kappa);
        (msg, l)
    }

    fn well_formed(&self, i: usize, q: &OracleQuery) -> bool {
        let prog = &self.key.program;
        let p = self.key.auth.p();
        let w_len = if i < prog.t() { prog.layers[i].w.len() } else { 0 };
        q.v_tilde.len() == i + 1
            && q.v_tilde.iter().enumerate().all(|(k, vs)| vs.len() == prog.v(k).len())
            && q.w_tilde.len() == w_len
            && q.v_tilde.iter().flatten().chain(&q.w_tilde).all(|c| c.len() == p)
    }

    fn evaluate(&self, i: usize, q: &OracleQuery) -> Result<OracleResponse, BotReason> {
        let prog = &self.key.program;
        if !tok_ver(&self.key.vk, &q.x, &q.sigma) {
            return Err(BotReason::BadToken);
        }
        if q.labels.len() != i || q.labels.iter().any(|l| l.len() != self.key.kappa) {
            return Err(BotReason::BadLabel);
        }
        if !self.well_formed(i, q) {
            return Err(BotReason::DecodeFail);
        }

        let mut r = Vec::with_capacity(i);
        for iota in 0..i {
            let (m0, l0) = self.label(q, iota, false);
            let (m1, l1) = self.label(q, iota, true);
            if l0 == l1 {
                return Err(BotReason::LabelCollision);
            }
            let (bit, msg) = if q.labels[iota] == l0 {
                (false, m0)
            } else if q.labels[iota] == l1 {
                (true, m1)
            } else {
                return Err(BotReason::BadLabel);
            };
            if let Some(log) = &self.log {
                let mut log = log.lock().expect("log lock");
                log.accepted += 1;
                if !log.emitted.contains(&(iota, msg)) {
                    log.unmatched += 1;
                }
            }
            r.push(bit);
        }

        let (x_l, z_l) = &self.frames[i];
        let theta = prog.theta(i);
        let codewords = q.v_tilde.iter().flatten().chain(&q.w_tilde);
        let mut values = Vec::new();
        for (w, c) in prog.phi_wires(i).into_iter().zip(codewords) {
            let basis = theta.get(w).ok_or(BotReason::DecodeFail)?;
            values.push(decode_block(&self.key.auth, &x_l[w], &z_l[w], basis, c).ok_or(BotReason::DecodeFail)?);
        }

        let simulated = match &self.mode {
            OracleMode::Real => None,
            OracleMode::Simulated(q_map) => Some(q_map),
        };
        if i == prog.t() {
            if let Some(q_map) = simulated {
                return Ok(OracleResponse::Output(q_map(&q.x)));
            }
            let out = self.functions[i].eval(&self.inputs(q, &r, &values));
            let y: Vec<bool> = self.output_slots.iter().map(|&s| out[s]).collect();
            return Ok(OracleResponse::Output(BitVector::from_bits(&y)));
        }
        let r_i = match simulated {
            Some(_) => false,
            None => self.functions[i].eval(&self.inputs(q, &r, &values))[0],
        };
        let (msg, label) = self.label(q, i, r_i);
        if let Some(log) = &self.log {
            log.lock().expect("log lock").emitted.insert((i, msg));
        }
        Ok(OracleResponse::Layer { v_tilde: q.v_tilde[i].clone(), label })
    }

    fn inputs(&self, q: &OracleQuery, r: &[bool], values: &[bool]) -> Vec<bool> {
        let mut inputs: Vec<bool> = (0..q.x.len()).map(|j| q.x.get(j)).collect();
        inputs.extend_from_slice(r);
        inputs.extend_from_slice(values);
        inputs
    }
}

impl OracleSet for Oracles {
    fn num_layers(&self) -> usize {
        self.key.program.t()
    }

    fn query(&self, i: usize, q: &OracleQuery) -> OracleResponse {
        if i > self.num_layers() {
            return OracleResponse::Bot(self.diagnostic.then_some(BotReason::DecodeFail));
        }
        match self.evaluate(i, q) {
            Ok(resp) => resp,
            Err(reason) => OracleResponse::Bot(self.diagnostic.then_some(reason)),
        }
    }
}

/// Wraps an oracle set and keeps every query with its response.
pub struct Recording<'a> {
    inner: &'a dyn OracleSet,
    calls: Mutex<Vec<(usize, OracleQuery, OracleResponse)>>,
}

impl<'a> Recording<'a> {
    pub fn new(inner: &'a dyn OracleSet) -> Self {
        Self { inner, calls: Mutex::new(Vec::new()) }
    }

    pub fn into_calls(self) -> Vec<(usize, OracleQuery, OracleResponse)> {
        self.calls.into_inner().expect("calls lock")
    }
}

impl OracleSet for Recording<'_> {
    fn num_layers(&self) -> usize {
        self.inner.num_layers()
    }

    fn query(&self, i: usize, q: &OracleQuery) -> OracleResponse {
        let resp = self.inner.query(i, q);
        self.calls.lock().expect("calls lock").push((i, q.clone(), resp.clone()));
        resp
    }
}
