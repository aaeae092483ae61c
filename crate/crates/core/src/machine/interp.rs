//! The exact interpreter: one clause per node kind.

use serde_json::{json, Value};

use super::{Machine, NodeKind, RFinite, RInfinity};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub node: String,
    pub state: RInfinity,
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UndefinedReason {
    DivisionByZero { node: String },
    /// The input length differs from the arity declared by the input node.
    ArityMismatch { expected: usize, got: usize },
}

impl UndefinedReason {
    pub fn tag(&self) -> &'static str {
        match self {
            UndefinedReason::DivisionByZero { .. } => "division-by-zero",
            UndefinedReason::ArityMismatch { .. } => "arity-mismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunResult {
    Output(RFinite),
    Undefined(UndefinedReason),
    Diverged(usize),
}

impl RunResult {
    pub fn output(&self) -> Option<&RFinite> {
        match self {
            RunResult::Output(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RunResult::Output(v) => json!({ "output": v.iter().map(Scalar::to_pq).collect::<Vec<_>>() }),
            RunResult::Undefined(r) => json!({ "undefined": r.tag() }),
            RunResult::Diverged(f) => json!({ "diverged": f }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Next(Configuration),
    Halt(RunResult),
}

/// Performs one transition from `c`.
///
/// The configuration at the input node holds the raw input laid out at
/// coordinates `0..n`; leaving it applies the standard embedding.
pub fn step(m: &Machine, c: &Configuration) -> StepOutcome {
    let node = m.node(&c.node).unwrap_or_else(|| panic!("node `{}` not in machine", c.node));
    let advance = |node: &str, state: RInfinity| {
        StepOutcome::Next(Configuration { node: node.to_string(), state, step: c.step + 1 })
    };
    match &node.kind {
        NodeKind::Input { arity, next } => advance(next, embed(&c.state, *arity)),
        NodeKind::Computation { map, next } => {
            let mut state = c.state.clone();
            for (&i, (num, den)) in map.assignments() {
                let at = |v: i64| c.state.get(v);
                let d = den.eval(&at);
                if d.is_zero() {
                    return StepOutcome::Halt(RunResult::Undefined(UndefinedReason::DivisionByZero {
                        node: node.id.clone(),
                    }));
                }
                state.set(i, &num.eval(&at) / &d);
            }
            advance(next, state)
        }
        NodeKind::Branch { test, if_nonneg, if_neg } => {
            let h = test.eval(&|v| c.state.get(v));
            let target = if h.is_negative() { if_neg } else { if_nonneg };
            advance(target, c.state.clone())
        }
        NodeKind::Shift { direction, next } => advance(next, c.state.shifted(direction.offset())),
        NodeKind::Output { coords } => {
            StepOutcome::Halt(RunResult::Output(coords.iter().map(|&i| c.state.get(i)).collect()))
        }
    }
}

fn embed(raw: &RInfinity, arity: usize) -> RInfinity {
    let mut s = RInfinity::new();
    s.set(0, Scalar::from_int(arity as i64));
    for j in 0..arity as i64 {
        s.set(j + 1, raw.get(j));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub machine: String,
    pub steps: Vec<Configuration>,
    pub result: RunResult,
}

impl Trace {
    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|c| {
                let state: serde_json::Map<String, Value> =
                    c.state.entries().iter().map(|(i, x)| (i.to_string(), Value::String(x.to_pq()))).collect();
                json!({ "node": c.node, "state": state })
            })
            .collect();
        json!({ "machine": self.machine, "steps": steps, "result": self.result.to_json() })
    }
}

/// Runs with a budget of `fuel` configurations; a computation visiting more
/// nodes than that reports `Diverged(fuel)`.
pub fn trace(m: &Machine, input: &RFinite, fuel: usize) -> Trace {
    let mut steps = Vec::new();
    let result = drive(m, input, fuel, |c| steps.push(c.clone()));
    Trace { machine: m.name().to_string(), steps, result }
}

pub fn run(m: &Machine, input: &RFinite, fuel: usize) -> RunResult {
    drive(m, input, fuel, |_| {})
}

fn drive(m: &Machine, input: &RFinite, fuel: usize, mut record: impl FnMut(&Configuration)) -> RunResult {
    if input.len() != m.arity() {
        return RunResult::Undefined(UndefinedReason::ArityMismatch { expected: m.arity(), got: input.len() });
    }
    let mut current =
        Configuration { node: m.input_node().to_string(), state: RInfinity::from_finite(input), step: 0 };
    let mut visited = 0;
    loop {
        if visited == fuel {
            return RunResult::Diverged(fuel);
        }
        record(&current);
        visited += 1;
        match step(m, &current) {
            StepOutcome::Halt(r) => return r,
            StepOutcome::Next(c) => current = c,
        }
    }
}
