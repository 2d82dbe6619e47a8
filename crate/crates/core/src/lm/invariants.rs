use std::collections::BTreeSet;
use std::fmt;

use crate::sim::Basis;

use super::program::{output_var, LmProgram, StateTag, LAYER_OUTPUT};

/// One failed structural check. `layer == t` refers to the final layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WireOutOfRange { layer: usize, wire: usize },
    BadStateTag { wire: usize, detail: String },
    DegenerateCnot { layer: usize, wire: usize },
    SetsOverlap { layer: usize, wire: usize },
    PhiMismatch { layer: usize },
    FinalNotComplete { missing: Vec<usize> },
    TouchesCollapsed { layer: usize, wire: usize },
    WNotStandardBasis { layer: usize, wire: usize },
    WUsedAsTarget { layer: usize, wire: usize },
    BasisChanged { layer: usize, wire: usize },
    BadFunction { layer: usize, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WireOutOfRange { layer, wire } => write!(f, "layer {layer}: wire {wire} out of range"),
            Violation::BadStateTag { wire, detail } => write!(f, "wire {wire}: {detail}"),
            Violation::DegenerateCnot { layer, wire } => {
                write!(f, "layer {layer}: CNOT with control and target {wire}")
            }
            Violation::SetsOverlap { layer, wire } => {
                write!(f, "layer {layer}: wire {wire} already belongs to an earlier V or W set")
            }
            Violation::PhiMismatch { layer } => {
                write!(f, "layer {layer}: measured wires differ from V_1..V_i, W_i")
            }
            Violation::FinalNotComplete { missing } => {
                write!(f, "final layer leaves wires {missing:?} unmeasured")
            }
            Violation::TouchesCollapsed { layer, wire } => {
                write!(f, "layer {layer}: linear layer touches collapsed wire {wire}")
            }
            Violation::WNotStandardBasis { layer, wire } => {
                write!(f, "layer {layer}: W wire {wire} not measured in the standard basis")
            }
            Violation::WUsedAsTarget { layer, wire } => {
                write!(f, "layer {layer}: W wire {wire} used as a CNOT target before its layer")
            }
            Violation::BasisChanged { layer, wire } => {
                write!(f, "layer {layer}: basis of collapsed wire {wire} changed")
            }
            Violation::BadFunction { layer, detail } => write!(f, "layer {layer}: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LmReport {
    pub violations: Vec<Violation>,
}

impl LmReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for LmReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_tags(p: &LmProgram, out: &mut Vec<Violation>) {
    let mut w = 0;
    while w < p.state.len() {
        match p.state[w] {
            StateTag::InputBit(j) if j >= p.num_inputs => out.push(Violation::BadStateTag {
                wire: w,
                detail: format!("input bit {j} out of range"),
            }),
            StateTag::MagicHA => {
                if p.state.get(w + 1) == Some(&StateTag::MagicHB) {
                    w += 1;
                } else {
                    out.push(Violation::BadStateTag { wire: w, detail: "unpaired H-magic half".into() });
                }
            }
            StateTag::MagicHB => {
                out.push(Violation::BadStateTag { wire: w, detail: "unpaired H-magic half".into() })
            }
            _ => {}
        }
        w += 1;
    }
}

/// Checks every structural property of an LM program and lists failures.
pub fn check_lm_invariants(p: &LmProgram) -> LmReport {
    let n = p.num_wires();
    let t = p.t();
    let mut out = Vec::new();
    check_tags(p, &mut out);

    let mut collapsed: BTreeSet<usize> = BTreeSet::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut bases: Vec<Option<Basis>> = vec![None; n];

    for i in 0..=t {
        let theta = p.theta(i);
        if theta.len() != n {
            out.push(Violation::PhiMismatch { layer: i });
            continue;
        }
        for c in p.linear(i) {
            for w in [c.control, c.target] {
                if w >= n {
                    out.push(Violation::WireOutOfRange { layer: i, wire: w });
                } else if collapsed.contains(&w) {
                    out.push(Violation::TouchesCollapsed { layer: i, wire: w });
                }
            }
            if c.control == c.target {
                out.push(Violation::DegenerateCnot { layer: i, wire: c.control });
            }
        }
        // W_k wires for k >= i may only act as controls in L_i.
        for k in i..t {
            for &w in &p.layers[k].w {
                if p.linear(i).iter().any(|c| c.target == w) {
                    out.push(Violation::WUsedAsTarget { layer: i, wire: w });
                }
            }
        }

        let w_set: &[usize] = if i < t { &p.layers[i].w } else { &[] };
        for &w in p.v(i).iter().chain(w_set) {
            if w >= n {
                out.push(Violation::WireOutOfRange { layer: i, wire: w });
            } else if collapsed.contains(&w) {
                out.push(Violation::SetsOverlap { layer: i, wire: w });
            }
        }
        let v_here: BTreeSet<usize> = p.v(i).iter().copied().collect();
        for &w in w_set {
            if v_here.contains(&w) || seen.contains(&w) {
                out.push(Violation::SetsOverlap { layer: i, wire: w });
            }
            if w < n && theta.get(w) != Some(Basis::Z) {
                out.push(Violation::WNotStandardBasis { layer: i, wire: w });
            }
        }

        let expected: BTreeSet<usize> = collapsed.iter().copied().chain(v_here.iter().copied()).chain(w_set.iter().copied()).collect();
        let actual: BTreeSet<usize> = theta.phi().into_iter().collect();
        if expected != actual {
            out.push(Violation::PhiMismatch { layer: i });
        }
        for &w in &collapsed {
            if w < n && theta.get(w).is_some() && theta.get(w) != bases[w] {
                out.push(Violation::BasisChanged { layer: i, wire: w });
            }
        }
        for &w in p.v(i) {
            if w < n {
                bases[w] = theta.get(w);
                collapsed.insert(w);
            }
        }
        seen.extend(w_set.iter().copied());

        match p.bind_function(i) {
            Err(e) => out.push(Violation::BadFunction { layer: i, detail: e.to_string() }),
            Ok(_) => {
                let names = p.function(i).output_names();
                let want: Vec<String> = if i < t {
                    vec![LAYER_OUTPUT.to_string()]
                } else {
                    (0..p.num_outputs).map(output_var).collect()
                };
                if names != want {
                    out.push(Violation::BadFunction {
                        layer: i,
                        detail: format!("outputs {names:?}, expected {want:?}"),
                    });
                }
            }
        }
    }

    let missing: Vec<usize> = (0..n).filter(|w| !collapsed.contains(w)).collect();
    if !missing.is_empty() {
        out.push(Violation::FinalNotComplete { missing });
    }
    LmReport { violations: out }
}
