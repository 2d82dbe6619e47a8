use std::collections::BTreeMap;

use crate::sim::{Basis, BasisString, Cnot};

use super::circuit::{Circuit, CircuitGate};
use super::classical::{DagBuilder, NodeId};
use super::program::{
    input_var, output_var, result_var, wire_var, FinalLayer, LmProgram, MeasurementLayer, StateTag,
    LAYER_OUTPUT,
};
use super::LmError;

struct OpenLayer {
    linear: Vec<Cnot>,
    v: Vec<usize>,
    w: Vec<usize>,
    r: NodeId,
}

/// Compiler state: a program whose output is Pauli-encoded on the active
/// wires. The physical state of active wire `a` equals X^x̂ Z^ẑ applied to
/// the logical state, with (x̂, ẑ) classical functions of the transcript.
struct Builder {
    dag: DagBuilder,
    tags: Vec<StateTag>,
    closed: Vec<OpenLayer>,
    linear: Vec<Cnot>,
    pending_v: Vec<usize>,
    basis: BTreeMap<usize, Basis>,
    active: Vec<usize>,
    frame: BTreeMap<usize, (NodeId, NodeId)>,
    num_inputs: usize,
}

impl Builder {
    fn new(c: &Circuit) -> Self {
        let mut dag = DagBuilder::new();
        let mut frame = BTreeMap::new();
        for w in 0..c.num_qubits() {
            let x_hat = if w < c.num_inputs() {
                dag.input(&input_var(w))
            } else {
                dag.zero()
            };
            frame.insert(w, (x_hat, dag.zero()));
        }
        Self {
            dag,
            tags: vec![StateTag::Zero; c.num_qubits()],
            closed: Vec::new(),
            linear: Vec::new(),
            pending_v: Vec::new(),
            basis: BTreeMap::new(),
            active: (0..c.num_qubits()).collect(),
            frame,
            num_inputs: c.num_inputs(),
        }
    }

    fn fresh(&mut self, tag: StateTag) -> usize {
        self.tags.push(tag);
        self.tags.len() - 1
    }

    fn v(&mut self, wire: usize) -> NodeId {
        self.dag.input(&wire_var(wire))
    }

    fn cnot(&mut self, i: usize, j: usize) {
        let (a, b) = (self.active[i], self.active[j]);
        self.linear.push(Cnot::new(a, b));
        let (xa, za) = self.frame[&a];
        let (xb, zb) = self.frame[&b];
        let za2 = self.dag.xor(za, zb);
        let xb2 = self.dag.xor(xa, xb);
        self.frame.insert(a, (xa, za2));
        self.frame.insert(b, (xb2, zb));
    }

    fn hadamard(&mut self, i: usize) {
        let wire = self.active[i];
        let a = self.fresh(StateTag::MagicHA);
        let b = self.fresh(StateTag::MagicHB);
        self.linear.push(Cnot::new(wire, a));
        self.pending_v.extend([wire, a]);
        self.basis.insert(wire, Basis::X);
        self.basis.insert(a, Basis::Z);
        let (x_hat, z_hat) = self.frame.remove(&wire).expect("active wire has a frame");
        let v_wire = self.v(wire);
        let v_a = self.v(a);
        let new_x = self.dag.xor(v_wire, z_hat);
        let new_z = self.dag.xor(v_a, x_hat);
        self.frame.insert(b, (new_x, new_z));
        self.active[i] = b;
    }

    fn t_gate(&mut self, i: usize) {
        let wire = self.active[i];
        let t_wire = self.fresh(StateTag::MagicT);
        let px_wire = self.fresh(StateTag::MagicPX);
        self.linear.push(Cnot::new(t_wire, wire));
        self.basis.insert(wire, Basis::Z);
        let (x_hat, z_hat) = self.frame.remove(&wire).expect("active wire has a frame");

        let v_wire = self.v(wire);
        let c = self.dag.xor(v_wire, x_hat);
        let w1 = self.v(t_wire);
        let w2 = self.v(px_wire);
        let cw1 = self.dag.and(c, w1);
        let r = self.dag.xor(w2, cw1);

        let mut v = std::mem::take(&mut self.pending_v);
        v.push(wire);
        v.sort_unstable();
        let layer_index = self.closed.len();
        self.closed.push(OpenLayer {
            linear: std::mem::take(&mut self.linear),
            v,
            w: vec![t_wire, px_wire],
            r,
        });

        self.pending_v.push(px_wire);
        self.basis.insert(px_wire, Basis::X);
        let v_px = self.v(px_wire);
        let r_node = self.dag.input(&result_var(layer_index));
        let s = self.dag.xor(v_px, r_node);
        let cs = self.dag.and(c, s);
        let new_z = self.dag.xor(cs, z_hat);
        self.frame.insert(t_wire, (c, new_z));
        self.active[i] = t_wire;
    }

    fn finish(mut self, outputs: &[usize]) -> LmProgram {
        let n = self.tags.len();
        for &a in &self.active {
            self.basis.insert(a, Basis::Z);
        }
        let mut measured: Vec<usize> = Vec::new();
        let mut layers = Vec::new();
        for layer in &self.closed {
            measured.extend(&layer.v);
            let mut theta = BasisString::unmeasured(n);
            for &w in &measured {
                theta.set(w, Some(self.basis[&w]));
            }
            for &w in &layer.w {
                theta.set(w, Some(Basis::Z));
            }
            let f = self.dag.extract(&[(LAYER_OUTPUT.to_string(), layer.r)]);
            layers.push(MeasurementLayer {
                linear: layer.linear.clone(),
                theta,
                v: layer.v.clone(),
                w: layer.w.clone(),
                f,
            });
        }
        let mut v_final = self.pending_v.clone();
        v_final.extend(&self.active);
        v_final.sort_unstable();
        measured.extend(&v_final);
        let mut theta = BasisString::unmeasured(n);
        for &w in &measured {
            theta.set(w, Some(self.basis[&w]));
        }
        let mut g_outputs = Vec::new();
        for (k, &o) in outputs.iter().enumerate() {
            let wire = self.active[o];
            let v = self.v(wire);
            let (x_hat, _) = self.frame[&wire];
            let y = self.dag.xor(v, x_hat);
            g_outputs.push((output_var(k), y));
        }
        let g = self.dag.extract(&g_outputs);
        LmProgram {
            num_inputs: self.num_inputs,
            num_outputs: outputs.len(),
            state: self.tags,
            layers,
            final_layer: FinalLayer {
                linear: self.linear,
                theta,
                v: v_final,
                g,
            },
        }
    }
}

/// Compiles a {CNOT, H, T} circuit into an equivalent LM program.
///
/// Every logical wire starts in |0⟩ with the classical input carried by the
/// X part of its Pauli frame, so the initial state never depends on x.
pub fn compile(c: &Circuit) -> Result<LmProgram, LmError> {
    let mut b = Builder::new(c);
    for g in c.gates() {
        match *g {
            CircuitGate::Cnot(i, j) => b.cnot(i, j),
            CircuitGate::H(i) => b.hadamard(i),
            CircuitGate::T(i) => b.t_gate(i),
        }
    }
    Ok(b.finish(c.outputs()))
}
