use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::LmError;

/// Node of a GF(2) circuit. Operands always refer to earlier nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Input(String),
    Const(bool),
    Xor(usize, usize),
    And(usize, usize),
}

/// A classical function as an XOR/AND DAG with named inputs and outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalFn {
    nodes: Vec<Node>,
    outputs: Vec<(String, usize)>,
}

impl ClassicalFn {
    pub fn new(nodes: Vec<Node>, outputs: Vec<(String, usize)>) -> Result<Self, LmError> {
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Xor(a, b) | Node::And(a, b) = *n {
                if a >= i || b >= i {
                    return Err(LmError::InvalidFunction(format!(
                        "node {i} refers forward to {}",
                        a.max(b)
                    )));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for (name, id) in &outputs {
            if *id >= nodes.len() {
                return Err(LmError::InvalidFunction(format!("output {name} refers to missing node {id}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(LmError::InvalidFunction(format!("duplicate output {name}")));
            }
        }
        Ok(Self { nodes, outputs })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[(String, usize)] {
        &self.outputs
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn input_names(&self) -> BTreeSet<&str> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Input(name) => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Evaluates with inputs supplied by `lookup`; outputs in declaration order.
    pub fn eval_with(&self, lookup: impl Fn(&str) -> Option<bool>) -> Result<Vec<bool>, LmError> {
        let mut vals = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let v = match n {
                Node::Input(name) => lookup(name).ok_or_else(|| LmError::UnboundInput(name.clone()))?,
                Node::Const(b) => *b,
                Node::Xor(a, b) => vals[*a] ^ vals[*b],
                Node::And(a, b) => vals[*a] & vals[*b],
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|(_, id)| vals[*id]).collect())
    }

    /// Resolves input names to positions in a flat input slice.
    pub fn bind(&self, resolve: impl Fn(&str) -> Option<usize>) -> Result<BoundFn, LmError> {
        let mut ops = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            ops.push(match n {
                Node::Input(name) => Op::Input(resolve(name).ok_or_else(|| LmError::UnboundInput(name.clone()))?),
                Node::Const(b) => Op::Const(*b),
                Node::Xor(a, b) => Op::Xor(*a, *b),
                Node::And(a, b) => Op::And(*a, *b),
            });
        }
        Ok(BoundFn {
            ops,
            outputs: self.outputs.iter().map(|(_, id)| *id).collect(),
        })
    }
}

/// Topological evaluation over a name → bit map.
pub fn eval_classical_fn(
    f: &ClassicalFn,
    bindings: &HashMap<String, bool>,
) -> Result<BTreeMap<String, bool>, LmError> {
    let vals = f.eval_with(|name| bindings.get(name).copied())?;
    Ok(f.outputs.iter().map(|(n, _)| n.clone()).zip(vals).collect())
}

#[derive(Clone, Debug)]
enum Op {
    Input(usize),
    Const(bool),
    Xor(usize, usize),
    And(usize, usize),
}

/// A [`ClassicalFn`] with inputs resolved to slice positions.
#[derive(Clone, Debug)]
pub struct BoundFn {
    ops: Vec<Op>,
    outputs: Vec<usize>,
}

impl BoundFn {
    pub fn eval(&self, inputs: &[bool]) -> Vec<bool> {
        let mut vals = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            vals.push(match *op {
                Op::Input(k) => inputs[k],
                Op::Const(b) => b,
                Op::Xor(a, b) => vals[a] ^ vals[b],
                Op::And(a, b) => vals[a] & vals[b],
            });
        }
        self.outputs.iter().map(|&id| vals[id]).collect()
    }
}

impl fmt::Display for ClassicalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            match n {
                Node::Input(name) => writeln!(f, "{i} input {name}")?,
                Node::Const(b) => writeln!(f, "{i} const {}", u8::from(*b))?,
                Node::Xor(a, b) => writeln!(f, "{i} xor {a} {b}")?,
                Node::And(a, b) => writeln!(f, "{i} and {a} {b}")?,
            }
        }
        for (name, id) in &self.outputs {
            writeln!(f, "out {name} {id}")?;
        }
        Ok(())
    }
}

impl ClassicalFn {
    /// Parses the lines produced by `Display`.
    pub fn parse_lines<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<Self, LmError> {
        let mut nodes = Vec::new();
        let mut outputs = Vec::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = || LmError::InvalidFunction(format!("bad node line {line:?}"));
            let num = |k: usize| -> Result<usize, LmError> {
                toks.get(k).and_then(|t| t.parse().ok()).ok_or_else(bad)
            };
            if toks.first() == Some(&"out") {
                if toks.len() != 3 {
                    return Err(bad());
                }
                outputs.push((toks[1].to_string(), num(2)?));
                continue;
            }
            if num(0)? != nodes.len() {
                return Err(LmError::InvalidFunction(format!("node numbering out of order at {line:?}")));
            }
            let node = match (toks.get(1).copied(), toks.len()) {
                (Some("input"), 3) => Node::Input(toks[2].to_string()),
                (Some("const"), 3) => match toks[2] {
                    "0" => Node::Const(false),
                    "1" => Node::Const(true),
                    _ => return Err(bad()),
                },
                (Some("xor"), 4) => Node::Xor(num(2)?, num(3)?),
                (Some("and"), 4) => Node::And(num(2)?, num(3)?),
                _ => return Err(bad()),
            };
            nodes.push(node);
        }
        ClassicalFn::new(nodes, outputs)
    }
}

/// Hash-consing builder with constant folding.
#[derive(Clone, Debug, Default)]
pub struct DagBuilder {
    nodes: Vec<Node>,
    memo: HashMap<Node, usize>,
}

pub type NodeId = usize;

impl DagBuilder {
    pub fn new() -> Self {
        let mut b = Self::default();
        b.intern(Node::Const(false));
        b.intern(Node::Const(true));
        b
    }

    fn intern(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.memo.get(&n) {
            return id;
        }
        self.nodes.push(n.clone());
        self.memo.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn zero(&self) -> NodeId {
        0
    }

    pub fn one(&self) -> NodeId {
        1
    }

    pub fn constant(&self, b: bool) -> NodeId {
        usize::from(b)
    }

    pub fn input(&mut self, name: &str) -> NodeId {
        self.intern(Node::Input(name.to_string()))
    }

    pub fn const_value(&self, id: NodeId) -> Option<bool> {
        match self.nodes[id] {
            Node::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn xor(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == b {
            return self.zero();
        }
        match (self.const_value(a), self.const_value(b)) {
            (Some(x), Some(y)) => self.constant(x ^ y),
            (Some(false), _) => b,
            (_, Some(false)) => a,
            _ => self.intern(Node::Xor(a.min(b), a.max(b))),
        }
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == b {
            return a;
        }
        match (self.const_value(a), self.const_value(b)) {
            (Some(false), _) | (_, Some(false)) => self.zero(),
            (Some(true), _) => b,
            (_, Some(true)) => a,
            _ => self.intern(Node::And(a.min(b), a.max(b))),
        }
    }

    /// The sub-DAG reachable from `outputs`, renumbered densely.
    pub fn extract(&self, outputs: &[(String, NodeId)]) -> ClassicalFn {
        let mut keep = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = outputs.iter().map(|(_, id)| *id).collect();
        while let Some(id) = stack.pop() {
            if keep[id] {
                continue;
            }
            keep[id] = true;
            if let Node::Xor(a, b) | Node::And(a, b) = self.nodes[id] {
                stack.push(a);
                stack.push(b);
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (id, n) in self.nodes.iter().enumerate() {
            if !keep[id] {
                continue;
            }
            remap[id] = nodes.len();
            nodes.push(match n {
                Node::Xor(a, b) => Node::Xor(remap[*a], remap[*b]),
                Node::And(a, b) => Node::And(remap[*a], remap[*b]),
                other => other.clone(),
            });
        }
        let outputs = outputs.iter().map(|(name, id)| (name.clone(), remap[*id])).collect();
        ClassicalFn::new(nodes, outputs).expect("extracted DAG is topologically ordered")
    }
}
