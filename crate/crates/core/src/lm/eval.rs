use std::collections::BTreeMap;

use rand::Rng;

use crate::gf2::BitVector;
use crate::sim::{self, Gate, MeasurementSpec, WireRegister};

use super::program::LmProgram;
use super::LmError;

/// Outcome of an intermediate layer: the V_i values and the result bit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LayerOutcome {
    pub v: BitVector,
    pub r: bool,
}

#[derive(Clone)]
struct Run<'p> {
    program: &'p LmProgram,
    x: BitVector,
    results: Vec<bool>,
    wires: WireRegister,
}

impl<'p> Run<'p> {
    fn new(program: &'p LmProgram, x: &BitVector) -> Result<Self, LmError> {
        if x.len() != program.num_inputs {
            return Err(LmError::InputLength { expected: program.num_inputs, found: x.len() });
        }
        let wires = WireRegister::new(program.num_wires(), program.initial_factors(Some(x))?)?;
        Ok(Self { program, x: x.clone(), results: Vec::new(), wires })
    }

    fn apply_linear(&mut self, i: usize) -> Result<(), LmError> {
        for c in self.program.linear(i) {
            self.wires.apply(Gate::Cnot(*c))?;
        }
        Ok(())
    }

    /// Builds the measurement of layer `i` over the live qubits. Wires frozen
    /// in the requested basis contribute fixed values; any other measured
    /// wire is brought live first.
    fn spec<O: 'static>(
        &mut self,
        i: usize,
        label: impl Fn(&[bool], &[bool]) -> O + 'static,
    ) -> Result<MeasurementSpec<'static, O>, LmError> {
        let theta = self.program.theta(i).clone();
        let phi = self.program.phi_wires(i);
        let mut fixed: Vec<Option<bool>> = Vec::with_capacity(phi.len());
        for &w in &phi {
            let want = theta.get(w).ok_or_else(|| {
                LmError::InvalidProgram(format!("layer {i} reads wire {w} which it does not measure"))
            })?;
            match self.wires.frozen(w) {
                Some((b, value)) if b == want => fixed.push(Some(value)),
                _ => {
                    self.wires.ensure_live(w)?;
                    fixed.push(None);
                }
            }
        }
        let nq = self.wires.live_state().num_qubits();
        let mut bases = vec![None; nq];
        let mut live_pos: Vec<(usize, usize)> = Vec::new();
        for (k, &w) in phi.iter().enumerate() {
            if fixed[k].is_none() {
                let q = self.wires.live_qubit(w).expect("made live above");
                bases[q] = theta.get(w);
                live_pos.push((k, q));
            }
        }
        let mut order: Vec<usize> = live_pos.iter().map(|&(_, q)| q).collect();
        order.sort_unstable();
        let positions: Vec<(usize, usize)> = live_pos
            .iter()
            .map(|&(k, q)| (k, order.binary_search(&q).expect("measured qubit present")))
            .collect();

        let f = self.program.bind_function(i)?;
        let mut prefix: Vec<bool> = self.x.iter().collect();
        prefix.extend(&self.results);
        let v_len = self.program.v(i).len();
        let v_offset = phi.len() - v_len - if i < self.program.t() { self.program.layers[i].w.len() } else { 0 };
        Ok(MeasurementSpec::new(bases, move |bits: &BitVector| {
            let mut values: Vec<bool> = fixed.iter().map(|v| v.unwrap_or(false)).collect();
            for &(k, pos) in &positions {
                values[k] = bits.get(pos);
            }
            let mut input = prefix.clone();
            input.extend(&values);
            let out = f.eval(&input);
            label(&values[v_offset..v_offset + v_len], &out)
        }))
    }

    fn layer_spec(&mut self, i: usize) -> Result<MeasurementSpec<'static, LayerOutcome>, LmError> {
        self.spec(i, |v, out| LayerOutcome { v: BitVector::from_bits(v), r: out[0] })
    }

    fn final_spec(&mut self) -> Result<MeasurementSpec<'static, BitVector>, LmError> {
        let t = self.program.t();
        self.spec(t, |_, out| BitVector::from_bits(out))
    }

    /// Records the layer result and freezes the collapsed V_i wires.
    fn settle(&mut self, i: usize, outcome: &LayerOutcome) -> Result<(), LmError> {
        self.results.push(outcome.r);
        let theta = self.program.theta(i);
        for (k, &w) in self.program.v(i).iter().enumerate() {
            let basis = theta.get(w).expect("V wires are measured");
            let value = self.wires.freeze(w, basis)?;
            debug_assert_eq!(value, outcome.v.get(k));
        }
        Ok(())
    }
}

/// Samples one run of the program on input `x`.
pub fn lmeval<R: Rng + ?Sized>(x: &BitVector, program: &LmProgram, rng: &mut R) -> Result<BitVector, LmError> {
    let mut run = Run::new(program, x)?;
    for i in 0..program.t() {
        run.apply_linear(i)?;
        let spec = run.layer_spec(i)?;
        let res = sim::measure(run.wires.live_state(), &spec, rng)?;
        *run.wires.live_state_mut() = res.post_state;
        run.settle(i, &res.outcome)?;
    }
    run.apply_linear(program.t())?;
    let spec = run.final_spec()?;
    Ok(sim::measure(run.wires.live_state(), &spec, rng)?.outcome)
}

/// Exact output distribution, following every intermediate outcome with its
/// Born weight.
pub fn lmeval_distribution(x: &BitVector, program: &LmProgram) -> Result<BTreeMap<BitVector, f64>, LmError> {
    let mut out = BTreeMap::new();
    let run = Run::new(program, x)?;
    explore(run, 0, 1.0, &mut out)?;
    Ok(out)
}

fn explore(mut run: Run<'_>, i: usize, weight: f64, out: &mut BTreeMap<BitVector, f64>) -> Result<(), LmError> {
    run.apply_linear(i)?;
    if i == run.program.t() {
        let spec = run.final_spec()?;
        for (y, p) in sim::outcome_probabilities(run.wires.live_state(), &spec)? {
            *out.entry(y).or_insert(0.0) += weight * p;
        }
        return Ok(());
    }
    let spec = run.layer_spec(i)?;
    for b in sim::branches(run.wires.live_state(), &spec)? {
        let mut next = run.clone();
        *next.wires.live_state_mut() = b.post_state;
        next.settle(i, &b.outcome)?;
        explore(next, i + 1, weight * b.probability, out)?;
    }
    Ok(())
}

/// Σ |p(y) − q(y)| over the union of supports.
pub fn total_variation(p: &BTreeMap<BitVector, f64>, q: &BTreeMap<BitVector, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&BitVector> = p.keys().chain(q.keys()).collect();
    keys.into_iter()
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum()
}
