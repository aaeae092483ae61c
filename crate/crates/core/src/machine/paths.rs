//! Bounded symbolic execution: every node sequence of bounded length from
//! the input node to an output node, with branch tests and divisors
//! composed into rational functions of the input variables.
//!
//! Input variable `j` (1-based) is polynomial variable `j`. Feasibility of
//! the resulting conditions is not decided.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::poly::RatFn;
use super::{Machine, NodeKind, RFinite};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    /// `p/q >= 0`, i.e. `p*q >= 0` with `q != 0`.
    NonNeg,
    Neg,
    /// Side condition for a divisor.
    NonZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCondition {
    pub function: RatFn,
    pub sign: Sign,
    /// Branch or computation node that produced the condition.
    pub node: String,
}

impl PathCondition {
    /// Evaluates the condition; `None` if the function itself is undefined.
    fn holds(&self, at: &dyn Fn(i64) -> Scalar) -> Option<bool> {
        let v = self.function.eval(at)?;
        Some(match self.sign {
            Sign::NonNeg => !v.is_negative(),
            Sign::Neg => v.is_negative(),
            Sign::NonZero => !v.is_zero(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSpec {
    pub arity: usize,
    pub nodes: Vec<String>,
    pub conditions: Vec<PathCondition>,
    pub outputs: Vec<RatFn>,
}

impl PathSpec {
    pub fn to_json(&self) -> Value {
        let conds: Vec<Value> = self
            .conditions
            .iter()
            .map(|c| {
                let rel = match c.sign {
                    Sign::NonNeg => ">=0",
                    Sign::Neg => "<0",
                    Sign::NonZero => "!=0",
                };
                json!({ "node": c.node, "function": c.function.to_string(), "sign": rel })
            })
            .collect();
        json!({
            "nodes": self.nodes,
            "conditions": conds,
            "outputs": self.outputs.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone)]
struct SymState {
    coords: BTreeMap<i64, RatFn>,
}

impl SymState {
    fn get(&self, i: i64) -> RatFn {
        self.coords.get(&i).cloned().unwrap_or_else(RatFn::zero)
    }

    fn set(&mut self, i: i64, f: RatFn) {
        if f.num.is_zero() {
            self.coords.remove(&i);
        } else {
            self.coords.insert(i, f);
        }
    }
}

/// Enumerates paths visiting at most `depth` nodes (the same measure as the
/// interpreter's fuel). Paths through a provably-zero divisor are dropped
/// since no input can follow them.
pub fn enumerate_paths(m: &Machine, arity: usize, depth: usize) -> Vec<PathSpec> {
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    // Raw input layout at the input node: a_j sits at coordinate j-1.
    let start = SymState { coords: (0..arity as i64).map(|j| (j, RatFn::var(j + 1))).collect() };
    let mut nodes = vec![m.input_node().to_string()];
    explore(m, arity, depth, start, &mut nodes, &mut Vec::new(), &mut out);
    out
}

fn explore(
    m: &Machine,
    arity: usize,
    depth: usize,
    state: SymState,
    nodes: &mut Vec<String>,
    conds: &mut Vec<PathCondition>,
    out: &mut Vec<PathSpec>,
) {
    let node = m.node(nodes.last().expect("nonempty")).expect("validated");
    if let NodeKind::Output { coords } = &node.kind {
        out.push(PathSpec {
            arity,
            nodes: nodes.clone(),
            conditions: conds.clone(),
            outputs: coords.iter().map(|&i| state.get(i)).collect(),
        });
        return;
    }
    if nodes.len() == depth {
        return;
    }
    let mut go = |next: &str, state: SymState, extra: Vec<PathCondition>, nodes: &mut Vec<String>, conds: &mut Vec<PathCondition>| {
        let before = conds.len();
        conds.extend(extra);
        nodes.push(next.to_string());
        explore(m, arity, depth, state, nodes, conds, out);
        nodes.pop();
        conds.truncate(before);
    };
    match &node.kind {
        NodeKind::Input { arity: declared, next } => {
            let mut s = SymState { coords: BTreeMap::new() };
            s.set(0, RatFn::constant(Scalar::from_int(*declared as i64)));
            for j in 0..*declared as i64 {
                s.set(j + 1, state.get(j));
            }
            go(next, s, Vec::new(), nodes, conds);
        }
        NodeKind::Computation { map, next } => {
            let mut s = state.clone();
            let mut extra = Vec::new();
            let lookup = |v: i64| state.get(v);
            for (&i, (num, den)) in map.assignments() {
                let n = num.compose(&lookup);
                let d = den.compose(&lookup);
                if d.as_constant_nonzero() {
                    s.set(i, n.div(&d).expect("nonzero constant"));
                    continue;
                }
                let Some(q) = n.div(&d) else {
                    return; // divisor is identically zero on this path
                };
                extra.push(PathCondition { function: d, sign: Sign::NonZero, node: node.id.clone() });
                s.set(i, q);
            }
            go(next, s, extra, nodes, conds);
        }
        NodeKind::Branch { test, if_nonneg, if_neg } => {
            let h = test.compose(&|v| state.get(v));
            let cond = |sign| PathCondition { function: h.clone(), sign, node: node.id.clone() };
            go(if_nonneg, state.clone(), vec![cond(Sign::NonNeg)], nodes, conds);
            go(if_neg, state, vec![cond(Sign::Neg)], nodes, conds);
        }
        NodeKind::Shift { direction, next } => {
            let off = direction.offset();
            let s = SymState { coords: state.coords.iter().map(|(i, f)| (i + off, f.clone())).collect() };
            go(next, s, Vec::new(), nodes, conds);
        }
        NodeKind::Output { .. } => unreachable!(),
    }
}

impl RatFn {
    fn as_constant_nonzero(&self) -> bool {
        self.is_polynomial() && self.num.as_constant().is_some_and(|c| !c.is_zero())
    }
}

/// The path's output at `input` if all of its conditions hold there.
pub fn eval_path(p: &PathSpec, input: &RFinite) -> Option<RFinite> {
    if input.len() != p.arity {
        return None;
    }
    let at = |v: i64| input[(v - 1) as usize].clone();
    for c in &p.conditions {
        if c.holds(&at) != Some(true) {
            return None;
        }
    }
    p.outputs.iter().map(|o| o.eval(&at)).collect()
}
