use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::gf2::BitVector;
use crate::lm::LmProgram;
use crate::sim::Basis;
use crate::token::{tok_sign, TokenError};

use super::encoding::{OracleQuery, OracleResponse};
use super::oracle::{OracleKey, OracleMode, OracleSet, Oracles, Recording};
use super::params::ObfParams;
use super::qobf::{qeval, qobf, ObfuscatedProgram};
use super::ObfError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttackKind {
    /// X^e with e ∉ S_Δ on a Z-measured block before evaluation.
    PauliTamper,
    /// Random κ-bit label guesses in an otherwise honest query.
    LabelForge,
    /// A second signature for a different input after an honest run.
    MixedInput,
    /// An honest label presented under a different earlier readout.
    Replay,
}

impl AttackKind {
    pub const ALL: [AttackKind; 4] =
        [AttackKind::PauliTamper, AttackKind::LabelForge, AttackKind::MixedInput, AttackKind::Replay];

    pub fn default_trials(self) -> usize {
        match self {
            AttackKind::PauliTamper => 1000,
            AttackKind::LabelForge => 1_000_000,
            AttackKind::MixedInput => 100,
            AttackKind::Replay => 1000,
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::PauliTamper => "pauli-tamper",
            AttackKind::LabelForge => "label-forge",
            AttackKind::MixedInput => "mixed-input",
            AttackKind::Replay => "replay",
        })
    }
}

impl FromStr for AttackKind {
    type Err = ObfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| ObfError::Parse(format!("unknown attack {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackReport {
    pub kind: AttackKind,
    pub trials: usize,
    pub rejected: usize,
    pub accepted: usize,
    /// Rejection reasons as reported by diagnostic oracles.
    pub reasons: BTreeMap<String, usize>,
    pub notes: Vec<String>,
}

impl AttackReport {
    fn new(kind: AttackKind) -> Self {
        Self { kind, trials: 0, rejected: 0, accepted: 0, reasons: BTreeMap::new(), notes: Vec::new() }
    }

    fn record(&mut self, resp: &OracleResponse) {
        self.trials += 1;
        match resp {
            OracleResponse::Bot(reason) => {
                self.rejected += 1;
                let r = reason.map_or_else(|| "unspecified".to_string(), |r| r.to_string());
                *self.reasons.entry(r).or_default() += 1;
            }
            _ => self.accepted += 1,
        }
    }

    pub fn all_rejected(&self) -> bool {
        self.trials > 0 && self.rejected == self.trials
    }
}

impl fmt::Display for AttackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "attack {}", self.kind)?;
        writeln!(f, "trials {}", self.trials)?;
        writeln!(f, "rejected {}", self.rejected)?;
        writeln!(f, "accepted {}", self.accepted)?;
        for (r, c) in &self.reasons {
            writeln!(f, "reason {r} {c}")?;
        }
        for n in &self.notes {
            writeln!(f, "note {n}")?;
        }
        Ok(())
    }
}

/// One honest evaluation with every oracle call recorded.
pub struct HonestRun {
    pub key: OracleKey,
    pub obf: ObfuscatedProgram,
    pub x: BitVector,
    pub y: BitVector,
    pub calls: Vec<(usize, OracleQuery, OracleResponse)>,
}

pub fn honest_run<R: Rng + ?Sized>(
    params: &ObfParams,
    program: &LmProgram,
    x: &BitVector,
    rng: &mut R,
) -> Result<HonestRun, ObfError> {
    let (mut obf, key) = qobf(params, program, rng)?;
    let oracles = Oracles::new(key.clone(), OracleMode::Real)?.diagnostic();
    let rec = Recording::new(&oracles);
    let y = qeval(x, &mut obf, &rec, rng)?;
    Ok(HonestRun { key, obf, x: x.clone(), y, calls: rec.into_calls() })
}

impl HonestRun {
    /// An accepted call at layer `i ≥ 1` (so it carries at least one label).
    pub fn labelled_call(&self) -> Option<(usize, &OracleQuery)> {
        self.calls.iter().find(|(i, _, r)| *i >= 1 && !r.is_bot()).map(|(i, q, _)| (*i, q))
    }
}

fn flip_bit(v: &BitVector, k: usize) -> BitVector {
    let mut v = v.clone();
    v.set(k, !v.get(k));
    v
}

/// A random corruption of `q`, or `q` unchanged a fifth of the time.
pub fn mutate_query<R: Rng + ?Sized>(q: &OracleQuery, rng: &mut R) -> OracleQuery {
    let mut m = q.clone();
    match rng.gen_range(0..10) {
        0 | 1 => {}
        2 if !m.x.is_empty() => {
            let k = rng.gen_range(0..m.x.len());
            m.x = flip_bit(&m.x, k);
        }
        3 if !m.sigma.vectors.is_empty() => {
            let j = rng.gen_range(0..m.sigma.vectors.len());
            let a = &m.sigma.vectors[j];
            m.sigma.vectors[j] = flip_bit(a, rng.gen_range(0..a.len()));
        }
        4 if !m.labels.is_empty() => {
            let j = rng.gen_range(0..m.labels.len());
            let l = &m.labels[j];
            m.labels[j] = flip_bit(l, rng.gen_range(0..l.len()));
        }
        5 if !m.labels.is_empty() => {
            m.labels.pop();
        }
        6 | 7 => {
            let mut slots: Vec<&mut BitVector> = m.v_tilde.iter_mut().flatten().chain(m.w_tilde.iter_mut()).collect();
            if !slots.is_empty() {
                let k = rng.gen_range(0..slots.len());
                let c = &mut *slots[k];
                *c = flip_bit(c, rng.gen_range(0..c.len()));
            }
        }
        _ => {
            let mut slots: Vec<&mut BitVector> = m.v_tilde.iter_mut().flatten().chain(m.w_tilde.iter_mut()).collect();
            if !slots.is_empty() {
                let k = rng.gen_range(0..slots.len());
                let len = slots[k].len();
                *slots[k] = BitVector::random(len, rng);
            }
        }
    }
    m
}

fn random_input<R: Rng + ?Sized>(program: &LmProgram, rng: &mut R) -> BitVector {
    BitVector::random(program.num_inputs, rng)
}

fn pauli_tamper<R: Rng + ?Sized>(
    params: &ObfParams,
    program: &LmProgram,
    trials: usize,
    rng: &mut R,
) -> Result<AttackReport, ObfError> {
    let mut report = AttackReport::new(AttackKind::PauliTamper);
    let target = (0..=program.t())
        .flat_map(|i| program.phi_wires(i).into_iter().map(move |w| (i, w)))
        .find(|&(i, w)| program.theta(i).get(w) == Some(Basis::Z))
        .map(|(_, w)| w)
        .ok_or_else(|| ObfError::NotApplicable("no Z-measured wire".into()))?;
    report.notes.push(format!("target wire {target}"));
    for _ in 0..trials {
        let (mut obf, key) = qobf(params, program, rng)?;
        let e = loop {
            let e = BitVector::random(key.auth.p(), rng);
            if !key.auth.s_delta().contains(&e) {
                break e;
            }
        };
        obf.register_mut().apply_pauli(target, &e, &BitVector::zeros(key.auth.p()))?;
        let oracles = Oracles::new(key, OracleMode::Real)?.diagnostic();
        let x = random_input(program, rng);
        match qeval(&x, &mut obf, &oracles, rng) {
            Ok(y) => report.record(&OracleResponse::Output(y)),
            Err(ObfError::Rejected { reason, .. }) => report.record(&OracleResponse::Bot(reason)),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

fn labelled_run<R: Rng + ?Sized>(
    params: &ObfParams,
    program: &LmProgram,
    rng: &mut R,
) -> Result<(HonestRun, usize, OracleQuery), ObfError> {
    if program.t() == 0 {
        return Err(ObfError::NotApplicable("program has no measurement layers, so no labels".into()));
    }
    let x = random_input(program, rng);
    let run = honest_run(params, program, &x, rng)?;
    let (i, q) = run.labelled_call().ok_or_else(|| ObfError::Protocol("no accepted labelled call".into()))?;
    let q = q.clone();
    Ok((run, i, q))
}

fn label_forge<R: Rng + ?Sized>(
    params: &ObfParams,
    program: &LmProgram,
    trials: usize,
    rng: &mut R,
) -> Result<AttackReport, ObfError> {
    let mut report = AttackReport::new(AttackKind::LabelForge);
    let (run, i, q) = labelled_run(params, program, rng)?;
    let oracles = Oracles::new(run.key.clone(), OracleMode::Real)?.diagnostic();
    report.notes.push(format!("kappa {} layer {i}", run.key.kappa));
    let mut forged = q.clone();
    for _ in 0..trials {
        let j = rng.gen_range(0..q.labels.len());
        forged.labels[j] = BitVector::random(run.key.kappa, rng);
        report.record(&oracles.query(i, &forged));
        forged.labels[j] = q.labels[j].clone();
    }
    Ok(report)
}

fn mixed_input<R: Rng + ?Sized>(
    params: &ObfParams,
    program: &LmProgram,
    trials: usize,
    rng: &mut R,
) -> Result<AttackReport, ObfError> {
    if program.num_inputs == 0 {
        return Err(ObfError::NotApplicable("program takes no input".into()));
    }
    let mut report = AttackReport::new(AttackKind::MixedInput);
    let mut residual_accepted = 0;
    for _ in 0..trials {
        let x = random_input(program, rng);
        let mut run = honest_run(params, program, &x, rng)?;
        let x2 = flip_bit(&x, rng.gen_range(0..x.len()));
        report.trials += 1;
        match tok_sign(&x2, run.obf.signing_key_mut(), rng) {
            Err(TokenError::Consumed) => {
                report.rejected += 1;
                *report.reasons.entry("sk-consumed".into()).or_default() += 1;
            }
            Err(e) => return Err(e.into()),
            Ok(_) => report.accepted += 1,
        }
        let sigma2 = run.obf.signing_key_mut().residual_signature(&x2, rng)?;
        let (i, q) = run.calls.first().map(|(i, q, _)| (*i, q.clone())).expect("one call at least");
        let oracles = Oracles::new(run.key.clone(), OracleMode::Real)?;
        let mixed = OracleQuery { x: x2, sigma: sigma2, ..q };
        if !oracles.query(i, &mixed).is_bot() {
            residual_accepted += 1;
        }
    }
    report.notes.push(format!(
        "measuring the spent key for x' passed the token check {residual_accepted}/{trials}"
    ));
    Ok(report)
}

fn replay<R: Rng + ?Sized>(
    params: &ObfParams,
    program: &LmProgram,
    trials: usize,
    rng: &mut R,
) -> Result<AttackReport, ObfError> {
    let mut report = AttackReport::new(AttackKind::Replay);
    let (run, i, q) = labelled_run(params, program, rng)?;
    let layer = (0..i)
        .find(|&l| !q.v_tilde[l].is_empty())
        .ok_or_else(|| ObfError::NotApplicable("no readout precedes the first label".into()))?;
    report.notes.push(format!("layer {i} query, readout of layer {layer} replaced"));
    let oracles = Oracles::new(run.key.clone(), OracleMode::Real)?.diagnostic();
    for _ in 0..trials {
        let mut m = q.clone();
        let k = rng.gen_range(0..m.v_tilde[layer].len());
        let old = m.v_tilde[layer][k].clone();
        m.v_tilde[layer][k] = loop {
            let c = BitVector::random(old.len(), rng);
            if c != old {
                break c;
            }
        };
        report.record(&oracles.query(i, &m));
    }
    Ok(report)
}

pub fn run_attack<R: Rng + ?Sized>(
    kind: AttackKind,
    params: &ObfParams,
    program: &LmProgram,
    trials: usize,
    rng: &mut R,
) -> Result<AttackReport, ObfError> {
    match kind {
        AttackKind::PauliTamper => pauli_tamper(params, program, trials, rng),
        AttackKind::LabelForge => label_forge(params, program, trials, rng),
        AttackKind::MixedInput => mixed_input(params, program, trials, rng),
        AttackKind::Replay => replay(params, program, trials, rng),
    }
}
