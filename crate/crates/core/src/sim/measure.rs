use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::Rng;

use super::{Gate, SimError, StateVector};
use crate::gf2::BitVector;

/// Amplitudes with smaller squared magnitude are treated as exact zeros when
/// forming outcome classes. This removes floating-point residue left by
/// destructive interference.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Basis::X
        } else {
            Basis::Z
        }
    }

    pub fn bit(self) -> bool {
        self == Basis::X
    }
}

/// A partial ZX measurement: a basis (or skip) per qubit and a classical
/// coarse-graining of the measured substring.
pub struct MeasurementSpec<'a, O> {
    bases: Vec<Option<Basis>>,
    outcome_fn: Box<dyn Fn(&BitVector) -> O + 'a>,
}

impl<'a, O> MeasurementSpec<'a, O> {
    pub fn new(bases: Vec<Option<Basis>>, outcome_fn: impl Fn(&BitVector) -> O + 'a) -> Self {
        Self {
            bases,
            outcome_fn: Box::new(outcome_fn),
        }
    }

    pub fn bases(&self) -> &[Option<Basis>] {
        &self.bases
    }

    pub fn measured_qubits(&self) -> Vec<usize> {
        (0..self.bases.len()).filter(|&q| self.bases[q].is_some()).collect()
    }

    pub fn outcome(&self, bits: &BitVector) -> O {
        (self.outcome_fn)(bits)
    }
}

impl<'a> MeasurementSpec<'a, BitVector> {
    /// Full readout of the measured qubits.
    pub fn identity(bases: Vec<Option<Basis>>) -> Self {
        Self::new(bases, |b: &BitVector| b.clone())
    }
}

#[derive(Clone, Debug)]
pub struct MeasurementResult<O> {
    pub outcome: O,
    pub raw_bits: BitVector,
    pub post_state: StateVector,
}

#[derive(Clone, Debug)]
pub struct Branch<O> {
    pub outcome: O,
    pub probability: f64,
    pub post_state: StateVector,
}

struct Classified<O> {
    conjugated: StateVector,
    x_qubits: Vec<usize>,
    measured: Vec<usize>,
    /// Outcome class index per amplitude, `usize::MAX` for negligible ones.
    class_of: Vec<usize>,
    outcomes: Vec<O>,
    weights: Vec<f64>,
}

fn substring_key(index: usize, masks: &[usize]) -> u64 {
    let mut key = 0u64;
    for &m in masks {
        key = (key << 1) | u64::from(index & m != 0);
    }
    key
}

fn classify<O: Ord + Clone>(
    state: &StateVector,
    spec: &MeasurementSpec<'_, O>,
) -> Result<Classified<O>, SimError> {
    if spec.bases.len() != state.num_qubits() {
        return Err(SimError::SizeMismatch(state.num_qubits(), spec.bases.len()));
    }
    let mut conjugated = state.clone();
    let x_qubits: Vec<usize> = (0..spec.bases.len())
        .filter(|&q| spec.bases[q] == Some(Basis::X))
        .collect();
    for &q in &x_qubits {
        conjugated.apply(Gate::H(q))?;
    }
    let measured = spec.measured_qubits();
    let masks: Vec<usize> = measured.iter().map(|&q| conjugated.bit_mask(q)).collect();

    let mut by_key: HashMap<u64, usize> = HashMap::new();
    let mut label_of_key: Vec<O> = Vec::new();
    let mut key_class = vec![usize::MAX; conjugated.amplitudes().len()];
    for (i, a) in conjugated.amplitudes().iter().enumerate() {
        if a.norm_sqr() <= NEGLIGIBLE_WEIGHT {
            continue;
        }
        let key = substring_key(i, &masks);
        let slot = *by_key.entry(key).or_insert_with(|| {
            let bits = BitVector::from_u64(key, masks.len());
            label_of_key.push(spec.outcome(&bits));
            label_of_key.len() - 1
        });
        key_class[i] = slot;
    }

    // Renumber classes in outcome order so iteration is deterministic.
    let mut ordered: BTreeMap<O, usize> = label_of_key.iter().map(|o| (o.clone(), 0)).collect();
    for (rank, slot) in ordered.values_mut().enumerate() {
        *slot = rank;
    }
    let outcomes: Vec<O> = ordered.keys().cloned().collect();
    let slot_to_class: Vec<usize> = label_of_key.iter().map(|o| ordered[o]).collect();

    let mut weights = vec![0.0; outcomes.len()];
    let mut class_of = key_class;
    for (i, c) in class_of.iter_mut().enumerate() {
        if *c != usize::MAX {
            *c = slot_to_class[*c];
            weights[*c] += conjugated.amplitudes()[i].norm_sqr();
        }
    }
    Ok(Classified {
        conjugated,
        x_qubits,
        measured,
        class_of,
        outcomes,
        weights,
    })
}

fn collapse<O>(c: &Classified<O>, class: usize) -> Result<StateVector, SimError> {
    let mut post = c.conjugated.clone();
    for (i, a) in post.amplitudes_mut().iter_mut().enumerate() {
        if c.class_of[i] != class {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    post.scale(1.0 / c.weights[class].sqrt());
    for &q in &c.x_qubits {
        post.apply(Gate::H(q))?;
    }
    Ok(post)
}

/// Samples an outcome by the Born rule and collapses onto its class.
pub fn measure<O: Ord + Clone, R: Rng + ?Sized>(
    state: &StateVector,
    spec: &MeasurementSpec<'_, O>,
    rng: &mut R,
) -> Result<MeasurementResult<O>, SimError> {
    let c = classify(state, spec)?;
    let total: f64 = c.weights.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    let mut chosen = c.weights.len() - 1;
    for (k, w) in c.weights.iter().enumerate() {
        if target < *w {
            chosen = k;
            break;
        }
        target -= w;
    }

    // A concrete readout consistent with the chosen class.
    let mut pick = rng.gen::<f64>() * c.weights[chosen];
    let amps = c.conjugated.amplitudes();
    let mut raw_index = None;
    for (i, &cls) in c.class_of.iter().enumerate() {
        if cls == chosen {
            raw_index = Some(i);
            let w = amps[i].norm_sqr();
            if pick < w {
                break;
            }
            pick -= w;
        }
    }
    let raw_index = raw_index.expect("chosen class has support");
    let masks: Vec<usize> = c.measured.iter().map(|&q| c.conjugated.bit_mask(q)).collect();
    let raw_bits = BitVector::from_u64(substring_key(raw_index, &masks), masks.len());

    let post_state = collapse(&c, chosen)?;
    Ok(MeasurementResult {
        outcome: c.outcomes[chosen].clone(),
        raw_bits,
        post_state,
    })
}

/// Every outcome with its probability and normalized post-measurement state,
/// in outcome order.
pub fn branches<O: Ord + Clone>(
    state: &StateVector,
    spec: &MeasurementSpec<'_, O>,
) -> Result<Vec<Branch<O>>, SimError> {
    let c = classify(state, spec)?;
    (0..c.outcomes.len())
        .map(|k| {
            Ok(Branch {
                outcome: c.outcomes[k].clone(),
                probability: c.weights[k],
                post_state: collapse(&c, k)?,
            })
        })
        .collect()
}

/// Outcome distribution without post-measurement states.
pub fn outcome_probabilities<O: Ord + Clone>(
    state: &StateVector,
    spec: &MeasurementSpec<'_, O>,
) -> Result<BTreeMap<O, f64>, SimError> {
    let c = classify(state, spec)?;
    Ok(c.outcomes.into_iter().zip(c.weights).collect())
}
