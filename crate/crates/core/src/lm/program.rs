use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::gf2::BitVector;
use crate::sim::{BasisString, Cnot, StateVector};

use super::classical::{BoundFn, ClassicalFn};
use super::{magic_state, LmError, MagicKind};

pub fn input_var(j: usize) -> String {
    format!("x{j}")
}

pub fn wire_var(w: usize) -> String {
    format!("v{w}")
}

pub fn result_var(i: usize) -> String {
    format!("r{i}")
}

pub fn output_var(k: usize) -> String {
    format!("y{k}")
}

/// Name of the single output of every layer function.
pub const LAYER_OUTPUT: &str = "r";

/// Initial state of one wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateTag {
    Zero,
    InputBit(usize),
    /// First half of |φ_H⟩; the second half is the next wire.
    MagicHA,
    MagicHB,
    MagicT,
    MagicPX,
}

impl fmt::Display for StateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateTag::Zero => f.write_str("zero"),
            StateTag::InputBit(j) => write!(f, "in:{j}"),
            StateTag::MagicHA => f.write_str("ha"),
            StateTag::MagicHB => f.write_str("hb"),
            StateTag::MagicT => f.write_str("t"),
            StateTag::MagicPX => f.write_str("px"),
        }
    }
}

impl FromStr for StateTag {
    type Err = LmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "zero" => StateTag::Zero,
            "ha" => StateTag::MagicHA,
            "hb" => StateTag::MagicHB,
            "t" => StateTag::MagicT,
            "px" => StateTag::MagicPX,
            other => match other.strip_prefix("in:").and_then(|j| j.parse().ok()) {
                Some(j) => StateTag::InputBit(j),
                None => return Err(LmError::InvalidProgram(format!("unknown state tag {other:?}"))),
            },
        })
    }
}

/// Layer `i < t`: linear part, partial measurement basis, V/W sets and f_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementLayer {
    pub linear: Vec<Cnot>,
    pub theta: BasisString,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    pub f: ClassicalFn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalLayer {
    pub linear: Vec<Cnot>,
    pub theta: BasisString,
    pub v: Vec<usize>,
    pub g: ClassicalFn,
}

/// An LM quantum program with classical input.
///
/// Classical functions read `x{j}` (input bits), `r{i}` (earlier layer
/// results) and `v{w}` (measured value of wire `w`). Each f_i has the single
/// output `r`; g has outputs `y0, y1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LmProgram {
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub state: Vec<StateTag>,
    pub layers: Vec<MeasurementLayer>,
    pub final_layer: FinalLayer,
}

impl LmProgram {
    pub fn num_wires(&self) -> usize {
        self.state.len()
    }

    /// Number of intermediate measurement layers t.
    pub fn t(&self) -> usize {
        self.layers.len()
    }

    /// Linear part of layer `i`, with `i == t` the final layer.
    pub fn linear(&self, i: usize) -> &[Cnot] {
        if i < self.t() {
            &self.layers[i].linear
        } else {
            &self.final_layer.linear
        }
    }

    pub fn theta(&self, i: usize) -> &BasisString {
        if i < self.t() {
            &self.layers[i].theta
        } else {
            &self.final_layer.theta
        }
    }

    pub fn v(&self, i: usize) -> &[usize] {
        if i < self.t() {
            &self.layers[i].v
        } else {
            &self.final_layer.v
        }
    }

    pub fn function(&self, i: usize) -> &ClassicalFn {
        if i < self.t() {
            &self.layers[i].f
        } else {
            &self.final_layer.g
        }
    }

    /// Measured wires of layer `i` in transcript order: V_0, ..., V_i, then W_i.
    pub fn phi_wires(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..=i).flat_map(|k| self.v(k).iter().copied()).collect();
        if i < self.t() {
            out.extend(&self.layers[i].w);
        }
        out
    }

    /// Binds the function of layer `i` to the flat input layout
    /// `[x bits, r_0 .. r_{i-1}, values of phi_wires(i)]`.
    pub fn bind_function(&self, i: usize) -> Result<BoundFn, LmError> {
        let m = self.num_inputs;
        let phi = self.phi_wires(i);
        self.function(i).bind(|name| {
            let (kind, idx) = name.split_at(1);
            let idx: usize = idx.parse().ok()?;
            match kind {
                "x" if idx < m => Some(idx),
                "r" if idx < i => Some(m + idx),
                "v" => phi.iter().position(|&w| w == idx).map(|p| m + i + p),
                _ => None,
            }
        })
    }

    /// Product factors of the initial state, one per wire or magic pair.
    pub fn initial_factors(&self, x: Option<&BitVector>) -> Result<Vec<(Vec<usize>, StateVector)>, LmError> {
        let mut out = Vec::new();
        let mut w = 0;
        while w < self.state.len() {
            let (wires, st) = match self.state[w] {
                StateTag::Zero => (vec![w], StateVector::zero(1)?),
                StateTag::InputBit(j) => {
                    let x = x.ok_or_else(|| LmError::InvalidProgram("input-bit tag requires an input".into()))?;
                    if j >= x.len() {
                        return Err(LmError::InvalidProgram(format!("input-bit tag {j} out of range")));
                    }
                    (vec![w], StateVector::basis_state(&BitVector::from_bits(&[x.get(j)]))?)
                }
                StateTag::MagicHA => {
                    if self.state.get(w + 1) != Some(&StateTag::MagicHB) {
                        return Err(LmError::InvalidProgram(format!("wire {w}: unpaired H-magic half")));
                    }
                    (vec![w, w + 1], magic_state(MagicKind::H))
                }
                StateTag::MagicHB => {
                    return Err(LmError::InvalidProgram(format!("wire {w}: unpaired H-magic half")));
                }
                StateTag::MagicT => (vec![w], magic_state(MagicKind::T)),
                StateTag::MagicPX => (vec![w], magic_state(MagicKind::PX)),
            };
            w += wires.len();
            out.push((wires, st));
        }
        Ok(out)
    }

    /// The full initial state as a dense vector.
    pub fn initial_state(&self, x: Option<&BitVector>) -> Result<StateVector, LmError> {
        let mut st = StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0)])?;
        for (_, f) in self.initial_factors(x)? {
            st = st.tensor(&f)?;
        }
        Ok(st)
    }
}

fn write_cnots(f: &mut fmt::Formatter<'_>, cnots: &[Cnot]) -> fmt::Result {
    f.write_str("linear")?;
    for c in cnots {
        write!(f, " {}>{}", c.control, c.target)?;
    }
    writeln!(f)
}

fn write_set(f: &mut fmt::Formatter<'_>, name: &str, set: &[usize]) -> fmt::Result {
    f.write_str(name)?;
    for w in set {
        write!(f, " {w}")?;
    }
    writeln!(f)
}

impl fmt::Display for LmProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lm-program")?;
        writeln!(f, "wires {}", self.num_wires())?;
        writeln!(f, "inputs {}", self.num_inputs)?;
        writeln!(f, "outputs {}", self.num_outputs)?;
        let tags: Vec<String> = self.state.iter().map(|t| t.to_string()).collect();
        writeln!(f, "state {}", tags.join(" "))?;
        for layer in &self.layers {
            writeln!(f, "layer")?;
            write_cnots(f, &layer.linear)?;
            writeln!(f, "theta {}", layer.theta)?;
            write_set(f, "v", &layer.v)?;
            write_set(f, "w", &layer.w)?;
            writeln!(f, "fn")?;
            write!(f, "{}", layer.f)?;
            writeln!(f, "end")?;
        }
        writeln!(f, "final")?;
        write_cnots(f, &self.final_layer.linear)?;
        writeln!(f, "theta {}", self.final_layer.theta)?;
        write_set(f, "v", &self.final_layer.v)?;
        writeln!(f, "fn")?;
        write!(f, "{}", self.final_layer.g)?;
        writeln!(f, "end")
    }
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), LmError> {
        loop {
            match self.inner.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((i, l)) => return Ok((i + 1, l.trim())),
                None => {
                    return Err(LmError::Parse {
                        line: 0,
                        message: "unexpected end of program".into(),
                    })
                }
            }
        }
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, Vec<&'a str>), LmError> {
        let (line, text) = self.next()?;
        let mut toks = text.split_whitespace();
        if toks.next() != Some(key) {
            return Err(LmError::Parse {
                line,
                message: format!("expected `{key}`"),
            });
        }
        Ok((line, toks.collect()))
    }

    fn number(&mut self, key: &str) -> Result<usize, LmError> {
        let (line, toks) = self.keyed(key)?;
        match toks.as_slice() {
            [n] => n.parse().map_err(|_| LmError::Parse { line, message: format!("bad number {n:?}") }),
            _ => Err(LmError::Parse { line, message: format!("`{key}` takes one number") }),
        }
    }

    fn set(&mut self, key: &str) -> Result<Vec<usize>, LmError> {
        let (line, toks) = self.keyed(key)?;
        toks.iter()
            .map(|t| t.parse().map_err(|_| LmError::Parse { line, message: format!("bad wire {t:?}") }))
            .collect()
    }

    fn cnots(&mut self) -> Result<Vec<Cnot>, LmError> {
        let (line, toks) = self.keyed("linear")?;
        toks.iter()
            .map(|t| {
                let (a, b) = t.split_once('>').ok_or_else(|| LmError::Parse {
                    line,
                    message: format!("bad CNOT {t:?}"),
                })?;
                match (a.parse(), b.parse()) {
                    (Ok(a), Ok(b)) => Ok(Cnot::new(a, b)),
                    _ => Err(LmError::Parse { line, message: format!("bad CNOT {t:?}") }),
                }
            })
            .collect()
    }

    fn theta(&mut self, n: usize) -> Result<BasisString, LmError> {
        let (line, toks) = self.keyed("theta")?;
        let text = match toks.as_slice() {
            [t] => *t,
            [] if n == 0 => "",
            _ => return Err(LmError::Parse { line, message: "theta takes one string".into() }),
        };
        let th: BasisString = text.parse().map_err(|e| LmError::Parse { line, message: format!("{e}") })?;
        if th.len() != n {
            return Err(LmError::Parse { line, message: format!("theta has length {} not {n}", th.len()) });
        }
        Ok(th)
    }

    fn function(&mut self) -> Result<ClassicalFn, LmError> {
        self.keyed("fn")?;
        let mut body = Vec::new();
        loop {
            let (_, text) = self.next()?;
            if text == "end" {
                break;
            }
            body.push(text);
        }
        ClassicalFn::parse_lines(body)
    }
}

impl FromStr for LmProgram {
    type Err = LmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = Lines { inner: s.lines().enumerate().peekable() };
        lines.keyed("lm-program")?;
        let n = lines.number("wires")?;
        let num_inputs = lines.number("inputs")?;
        let num_outputs = lines.number("outputs")?;
        let (line, tags) = lines.keyed("state")?;
        let state = tags.iter().map(|t| t.parse()).collect::<Result<Vec<StateTag>, _>>()?;
        if state.len() != n {
            return Err(LmError::Parse { line, message: format!("{} state tags for {n} wires", state.len()) });
        }
        let mut layers = Vec::new();
        loop {
            let (line, text) = lines.next()?;
            match text {
                "layer" => {
                    let linear = lines.cnots()?;
                    let theta = lines.theta(n)?;
                    let v = lines.set("v")?;
                    let w = lines.set("w")?;
                    let f = lines.function()?;
                    layers.push(MeasurementLayer { linear, theta, v, w, f });
                }
                "final" => break,
                _ => return Err(LmError::Parse { line, message: "expected `layer` or `final`".into() }),
            }
        }
        let linear = lines.cnots()?;
        let theta = lines.theta(n)?;
        let v = lines.set("v")?;
        let g = lines.function()?;
        if let Some((i, l)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
            return Err(LmError::Parse { line: i + 1, message: format!("trailing content {l:?}") });
        }
        Ok(LmProgram {
            num_inputs,
            num_outputs,
            state,
            layers,
            final_layer: FinalLayer { linear, theta, v, g },
        })
    }
}
