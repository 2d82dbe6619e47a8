use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::gf2::BitVector;
use crate::sim::{Basis, Cnot, Gate, MeasurementSpec, StateVector};

use super::LmError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CircuitGate {
    Cnot(usize, usize),
    H(usize),
    T(usize),
}

impl CircuitGate {
    fn wires(&self) -> Vec<usize> {
        match *self {
            CircuitGate::Cnot(a, b) => vec![a, b],
            CircuitGate::H(a) | CircuitGate::T(a) => vec![a],
        }
    }

    pub fn to_sim(self) -> Gate {
        match self {
            CircuitGate::Cnot(a, b) => Gate::Cnot(Cnot::new(a, b)),
            CircuitGate::H(a) => Gate::H(a),
            CircuitGate::T(a) => Gate::T(a),
        }
    }
}

/// A {CNOT, H, T} circuit. The first `num_inputs` wires hold the classical
/// input; the rest start in |0⟩. Outputs are read in the Z basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    num_inputs: usize,
    gates: Vec<CircuitGate>,
    outputs: Vec<usize>,
}

impl Circuit {
    pub fn new(
        num_qubits: usize,
        num_inputs: usize,
        gates: Vec<CircuitGate>,
        outputs: Vec<usize>,
    ) -> Result<Self, LmError> {
        if num_inputs > num_qubits {
            return Err(LmError::InvalidCircuit(format!(
                "{num_inputs} inputs but only {num_qubits} qubits"
            )));
        }
        for g in &gates {
            let ws = g.wires();
            if ws.iter().any(|&w| w >= num_qubits) {
                return Err(LmError::InvalidCircuit(format!("gate {g:?} addresses a missing wire")));
            }
            if ws.len() == 2 && ws[0] == ws[1] {
                return Err(LmError::InvalidCircuit(format!("gate {g:?} repeats a wire")));
            }
        }
        if let Some(&w) = outputs.iter().find(|&&w| w >= num_qubits) {
            return Err(LmError::InvalidCircuit(format!("output wire {w} out of range")));
        }
        Ok(Self {
            num_qubits,
            num_inputs,
            gates,
            outputs,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn gates(&self) -> &[CircuitGate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, CircuitGate::T(_))).count()
    }

    /// Exact output distribution by direct statevector simulation.
    pub fn output_distribution(&self, x: &BitVector) -> Result<BTreeMap<BitVector, f64>, LmError> {
        if x.len() != self.num_inputs {
            return Err(LmError::InputLength { expected: self.num_inputs, found: x.len() });
        }
        let mut init = BitVector::zeros(self.num_qubits);
        for j in 0..self.num_inputs {
            init.set(j, x.get(j));
        }
        let mut st = StateVector::basis_state(&init)?;
        for g in &self.gates {
            st.apply(g.to_sim())?;
        }
        let mut bases = vec![None; self.num_qubits];
        for &w in &self.outputs {
            bases[w] = Some(Basis::Z);
        }
        let order = self.outputs.clone();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let spec = MeasurementSpec::new(bases, move |bits: &BitVector| {
            let mut y = BitVector::zeros(order.len());
            for (k, w) in order.iter().enumerate() {
                let pos = sorted.binary_search(w).expect("output wire measured");
                y.set(k, bits.get(pos));
            }
            y
        });
        Ok(crate::sim::outcome_probabilities(&st, &spec)?)
    }

    /// The induced map Q for a deterministic circuit, or `None` if some
    /// input has no output of probability one.
    pub fn deterministic_output(&self, x: &BitVector) -> Result<Option<BitVector>, LmError> {
        let dist = self.output_distribution(x)?;
        Ok(dist
            .into_iter()
            .find(|(_, p)| (p - 1.0).abs() < 1e-9)
            .map(|(y, _)| y))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let outs: Vec<String> = self.outputs.iter().map(|w| w.to_string()).collect();
        write!(f, "qubits {} inputs {} outputs {}", self.num_qubits, self.num_inputs, outs.join(","))?;
        writeln!(f)?;
        for g in &self.gates {
            match g {
                CircuitGate::Cnot(a, b) => writeln!(f, "CNOT {a} {b}")?,
                CircuitGate::H(a) => writeln!(f, "H {a}")?,
                CircuitGate::T(a) => writeln!(f, "T {a}")?,
            }
        }
        Ok(())
    }
}

fn parse_index(tok: Option<&str>, line: usize) -> Result<usize, LmError> {
    let tok = tok.ok_or_else(|| LmError::Parse { line, message: "missing wire index".into() })?;
    tok.parse().map_err(|_| LmError::Parse {
        line,
        message: format!("bad integer {tok:?}"),
    })
}

impl FromStr for Circuit {
    type Err = LmError;

    /// Header `qubits N inputs M outputs w1,w2,...` then one gate per line.
    /// Blank lines and `#` comments are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(LmError::Parse {
            line: 1,
            message: "empty circuit file".into(),
        })?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() < 5 || toks.len() > 6 || toks[0] != "qubits" || toks[2] != "inputs" || toks[4] != "outputs" {
            return Err(LmError::Parse {
                line: hline,
                message: "expected header `qubits N inputs M outputs w1,w2,...`".into(),
            });
        }
        let n = parse_index(Some(toks[1]), hline)?;
        let m = parse_index(Some(toks[3]), hline)?;
        let outputs = match toks.get(5) {
            None => Vec::new(),
            Some(list) => list
                .split(',')
                .map(|w| parse_index(Some(w), hline))
                .collect::<Result<Vec<_>, _>>()?,
        };
        let mut gates = Vec::new();
        for (line, text) in lines {
            let mut it = text.split_whitespace();
            let name = it.next().unwrap_or_default();
            let gate = match name {
                "CNOT" => CircuitGate::Cnot(parse_index(it.next(), line)?, parse_index(it.next(), line)?),
                "H" => CircuitGate::H(parse_index(it.next(), line)?),
                "T" => CircuitGate::T(parse_index(it.next(), line)?),
                other => {
                    return Err(LmError::Parse {
                        line,
                        message: format!("unsupported gate {other:?}"),
                    })
                }
            };
            if it.next().is_some() {
                return Err(LmError::Parse { line, message: "trailing tokens".into() });
            }
            gates.push(gate);
        }
        Circuit::new(n, m, gates, outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let text = "qubits 2 inputs 1 outputs 0,1\nH 0\n# comment\nCNOT 0 1\nT 1\n";
        let c: Circuit = text.parse().unwrap();
        assert_eq!(c.gates().len(), 3);
        assert_eq!(c.to_string(), "qubits 2 inputs 1 outputs 0,1\nH 0\nCNOT 0 1\nT 1\n");
        assert_eq!(c.to_string().parse::<Circuit>().unwrap(), c);
    }

    #[test]
    fn rejects_unknown_gates_and_bad_wires() {
        assert!(matches!(
            "qubits 3 inputs 0 outputs 0\nCCZ 1 2 3".parse::<Circuit>(),
            Err(LmError::Parse { line: 2, .. })
        ));
        assert!("qubits 1 inputs 0 outputs 0\nH 1".parse::<Circuit>().is_err());
        assert!("qubits 2 inputs 0 outputs 0\nCNOT 1 1".parse::<Circuit>().is_err());
    }

    #[test]
    fn h_t_h_distribution() {
        let c: Circuit = "qubits 1 inputs 1 outputs 0\nH 0\nT 0\nH 0".parse().unwrap();
        let d = c.output_distribution(&"0".parse().unwrap()).unwrap();
        let p0 = d[&"0".parse::<BitVector>().unwrap()];
        assert!((p0 - (std::f64::consts::PI / 8.0).cos().powi(2)).abs() < 1e-12);
        assert_eq!(c.deterministic_output(&"0".parse().unwrap()).unwrap(), None);
    }

    #[test]
    fn output_order_follows_list() {
        let c: Circuit = "qubits 2 inputs 2 outputs 1,0".parse().unwrap();
        let y = c.deterministic_output(&"10".parse().unwrap()).unwrap().unwrap();
        assert_eq!(y.to_string(), "01");
    }
}
