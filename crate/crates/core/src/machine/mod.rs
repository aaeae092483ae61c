//! BSS machines over the ordered field, evaluated with exact rationals.
//!
//! A machine is a finite graph of input, computation, branch, shift and
//! output nodes acting on a bi-infinite, almost-everywhere-zero state
//! vector. [`interp`] runs it, [`paths`] executes it symbolically, and
//! [`parse`] reads the line-oriented DSL.

pub mod expr;
pub mod interp;
pub mod parse;
pub mod paths;
pub mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;
pub use interp::{run, step, trace, Configuration, RunResult, StepOutcome, Trace, UndefinedReason};
pub use parse::parse_machine;
pub use paths::{enumerate_paths, eval_path, PathCondition, PathSpec, Sign};
pub use poly::{Monomial, Poly, RatFn};

/// An element of the bi-infinite direct sum: a finite map from coordinate to
/// value with no zero entries stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RInfinity {
    entries: BTreeMap<i64, Scalar>,
}

impl RInfinity {
    pub fn new() -> Self {
        RInfinity::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut v = RInfinity::new();
        for (i, x) in pairs {
            v.set(i, x);
        }
        v
    }

    /// Lays a finite sequence out at coordinates `0..n`.
    pub fn from_finite(values: &RFinite) -> Self {
        RInfinity::from_pairs(values.iter().enumerate().map(|(i, x)| (i as i64, x.clone())))
    }

    pub fn get(&self, i: i64) -> Scalar {
        self.entries.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, i: i64, x: Scalar) {
        if x.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, x);
        }
    }

    pub fn entries(&self) -> &BTreeMap<i64, Scalar> {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Re-indexes every entry by `offset`.
    pub fn shifted(&self, offset: i64) -> Self {
        RInfinity { entries: self.entries.iter().map(|(i, x)| (i + offset, x.clone())).collect() }
    }
}

impl fmt::Debug for RInfinity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

/// A finite sequence of reals; inputs and outputs of a machine.
pub type RFinite = Vec<Scalar>;

/// Simultaneous assignment of rational functions to a finite window of
/// coordinates. Coordinates outside the window keep their value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap {
    assignments: BTreeMap<i64, (Poly, Poly)>,
}

impl RationalMap {
    /// Fails if some denominator is the zero polynomial.
    pub fn new(assignments: BTreeMap<i64, (Poly, Poly)>) -> Option<Self> {
        if assignments.values().any(|(_, d)| d.is_zero()) {
            return None;
        }
        Some(RationalMap { assignments })
    }

    pub fn assignments(&self) -> &BTreeMap<i64, (Poly, Poly)> {
        &self.assignments
    }

    /// Every coordinate read or written.
    pub fn window(&self) -> BTreeSet<i64> {
        let mut w: BTreeSet<i64> = self.assignments.keys().copied().collect();
        for (n, d) in self.assignments.values() {
            w.extend(n.variables());
            w.extend(d.variables());
        }
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    /// Index offset applied to every entry: `σ_l(x)_i = x_{i+1}` moves the
    /// value at `i+1` down to `i`.
    pub fn offset(self) -> i64 {
        match self {
            Direction::Left => -1,
            Direction::Right => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Standard embedding: input `(a_1..a_n)` goes to coordinates `1..n`
    /// and `n` is stored at coordinate 0.
    Input { arity: usize, next: String },
    Computation { map: RationalMap, next: String },
    /// Takes `if_nonneg` when `test(x) >= 0`, `if_neg` otherwise.
    Branch { test: Poly, if_nonneg: String, if_neg: String },
    Shift { direction: Direction, next: String },
    Output { coords: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn successors(&self) -> Vec<&str> {
        match &self.kind {
            NodeKind::Input { next, .. }
            | NodeKind::Computation { next, .. }
            | NodeKind::Shift { next, .. } => vec![next.as_str()],
            NodeKind::Branch { if_nonneg, if_neg, .. } => vec![if_nonneg.as_str(), if_neg.as_str()],
            NodeKind::Output { .. } => Vec::new(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NodeKind::Input { .. } => "input",
            NodeKind::Computation { .. } => "compute",
            NodeKind::Branch { .. } => "branch",
            NodeKind::Shift { .. } => "shift",
            NodeKind::Output { .. } => "output",
        }
    }
}

/// Id under which the DSL registers the input node.
pub const INPUT_NODE: &str = "input";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    name: String,
    nodes: BTreeMap<String, Node>,
    input_node: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("{}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based source line, 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

fn format_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| if d.line > 0 { format!("line {}: {}", d.line, d.message) } else { d.message.clone() })
        .collect::<Vec<_>>()
        .join("\n")
}

impl MachineError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            MachineError::Invalid(ds) => ds,
        }
    }
}

impl Machine {
    /// Validates the graph: a unique input node without incoming edges,
    /// every referenced id present, and weak connectivity.
    pub fn new(name: impl Into<String>, nodes: Vec<Node>, input_node: impl Into<String>) -> Result<Self, MachineError> {
        let input_node = input_node.into();
        let mut diags = Vec::new();
        let mut map = BTreeMap::new();
        for n in nodes {
            if map.contains_key(&n.id) {
                diags.push(Diagnostic { line: 0, message: format!("duplicate node id `{}`", n.id) });
                continue;
            }
            map.insert(n.id.clone(), n);
        }
        let m = Machine { name: name.into(), nodes: map, input_node };
        diags.extend(m.validate());
        if diags.is_empty() {
            Ok(m)
        } else {
            Err(MachineError::Invalid(diags))
        }
    }

    fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut push = |message: String| diags.push(Diagnostic { line: 0, message });
        match self.nodes.get(&self.input_node) {
            Some(Node { kind: NodeKind::Input { .. }, .. }) => {}
            Some(_) => push(format!("node `{}` is not an input node", self.input_node)),
            None => push("machine has no input node".into()),
        }
        let inputs = self.nodes.values().filter(|n| matches!(n.kind, NodeKind::Input { .. })).count();
        if inputs > 1 {
            push("a machine has a unique input node".into());
        }
        for n in self.nodes.values() {
            for s in n.successors() {
                if !self.nodes.contains_key(s) {
                    push(format!("node `{}` references undeclared node `{s}`", n.id));
                } else if s == self.input_node {
                    push(format!("node `{}` points at the input node, which has no incoming edges", n.id));
                }
            }
        }
        if !self.weakly_connected() {
            push("machine graph is not connected".into());
        }
        diags
    }

    fn weakly_connected(&self) -> bool {
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for n in self.nodes.values() {
            for s in n.successors() {
                if self.nodes.contains_key(s) {
                    adj.entry(n.id.as_str()).or_default().push(s);
                    adj.entry(s).or_default().push(n.id.as_str());
                }
            }
        }
        let Some(start) = self.nodes.keys().next() else { return true };
        let mut seen = BTreeSet::new();
        let mut stack = vec![start.as_str()];
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(adj.get(v).into_iter().flatten().copied());
            }
        }
        seen.len() == self.nodes.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &BTreeMap<String, Node> {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn input_node(&self) -> &str {
        &self.input_node
    }

    pub fn arity(&self) -> usize {
        match &self.nodes[&self.input_node].kind {
            NodeKind::Input { arity, .. } => *arity,
            _ => unreachable!("validated input node"),
        }
    }

    /// Position of a node in id order; used as its numeric code.
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.keys().position(|k| k == id)
    }
}
