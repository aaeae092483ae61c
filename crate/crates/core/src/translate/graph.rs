//! Graph formulas of machines: `∃c ValidTrace(c, x̄, y)`.
//!
//! A trace code is `{(k, E_k)}` over steps `k = 0..T`, where
//! `E_k = {(0, node), (1, state), (2, tape)}`: the node's index as an atom,
//! the sparse code of the state, and the dense set of tape cells used to
//! leave that configuration (empty for input, shift and output nodes).
//! Pairs are `(i, x) = {{i}, {{x}}}` throughout.

use crate::hf::formula::{and, exists, member, not, or, Formula, Term};
use crate::hf::{encode_seq, HfSet};
use crate::machine::{trace, Machine, NodeKind, RFinite, RunResult};
use crate::Scalar;

use super::build::*;
use super::tape::{Tape, TapeOp};
use super::{input_var, SigmaFunctionDef, OUTPUT_VAR};

pub const TRACE_VAR: &str = "c";

fn tag(i: i64, x: HfSet) -> HfSet {
    HfSet::set([HfSet::singleton(HfSet::atom(i)), HfSet::singleton(HfSet::singleton(x))])
}

fn node_tape(m: &Machine, node: &str) -> Option<Tape> {
    match &m.node(node)?.kind {
        NodeKind::Computation { map, .. } => Some(Tape::for_map(map)),
        NodeKind::Branch { test, .. } => Some(Tape::for_test(test)),
        _ => None,
    }
}

/// The trace code of the run on `input`, when it halts within `fuel`.
pub fn trace_code(m: &Machine, input: &RFinite, fuel: usize) -> Option<HfSet> {
    let t = trace(m, input, fuel);
    if !matches!(t.result, RunResult::Output(_)) {
        return None;
    }
    let mut entries = Vec::with_capacity(t.steps.len());
    for (k, c) in t.steps.iter().enumerate() {
        let cells = match node_tape(m, &c.node) {
            Some(tape) => tape.run(&c.state)?,
            None => Vec::new(),
        };
        let w = HfSet::set(cells.iter().enumerate().map(|(j, x)| HfSet::pair_tag(j as i64, x)));
        let node = m.node_index(&c.node)? as i64;
        let e = HfSet::set([tag(0, HfSet::atom(node)), tag(1, encode_seq(&c.state)), tag(2, w)]);
        entries.push(tag(k as i64, e));
    }
    Some(HfSet::set(entries))
}

struct Stage {
    k: Term,
    node: Term,
    state: Term,
    tape: Term,
}

/// Decomposes every or some entry of the trace into its stage fields.
fn entry(nm: &mut Namer, c: &Term, universal: bool, body: &mut dyn FnMut(&mut Namer, Term, Stage) -> Formula) -> Formula {
    let mut inner = |nm: &mut Namer, p: Term, k: Term, e: Term| {
        lookup(nm, &e, &int(0), &mut |nm, node| {
            let (k, p, node) = (k.clone(), p.clone(), node.clone());
            lookup(nm, &e, &int(1), &mut |nm, state| {
                let (k, p, node) = (k.clone(), p.clone(), node.clone());
                lookup(nm, &e, &int(2), &mut |nm, tape| {
                    body(nm, p.clone(), Stage { k: k.clone(), node: node.clone(), state: state.clone(), tape })
                })
            })
        })
    };
    if universal {
        all_pairs(nm, c, &mut inner)
    } else {
        some_pair(nm, c, &mut inner)
    }
}

fn tape_check(nm: &mut Namer, tape: &Tape, w: &Term, s: &Term) -> Formula {
    let mut parts = vec![unique_indices(nm, w)];
    for (j, op) in tape.ops.iter().enumerate() {
        let f = lookup(nm, w, &int(j as i64), &mut |nm, t| match op {
            TapeOp::Read(var) => val_at(nm, s, &int(*var), &mut |_, a| eq(&t, &a)),
            TapeOp::Const(c) => eq(&t, &Term::atom(c.clone())),
            TapeOp::Add(a, b) | TapeOp::Mul(a, b) | TapeOp::Div(a, b) => {
                let t = t.clone();
                lookup(nm, w, &int(*a as i64), &mut |nm, ta| {
                    let t = t.clone();
                    lookup(nm, w, &int(*b as i64), &mut |_, tb| match op {
                        TapeOp::Add(..) => add(&ta, &tb, &t),
                        TapeOp::Mul(..) => mul(&ta, &tb, &t),
                        _ => and(vec![not(is_zero(&tb)), mul(&t, &tb, &ta)]),
                    })
                })
            }
        });
        parts.push(f);
    }
    and(parts)
}

fn node_atom(m: &Machine, id: &str) -> Term {
    int(m.node_index(id).expect("validated successor") as i64)
}

/// The transition out of `cur` lands in `next`.
fn step_clause(nm: &mut Namer, m: &Machine, kind: &NodeKind, cur: &Stage, next: &Stage) -> Formula {
    let (s, s1) = (&cur.state, &next.state);
    match kind {
        NodeKind::Input { arity, next: id } => {
            let n = *arity as i64;
            let mut parts = vec![
                eq(&next.node, &node_atom(m, id)),
                sparse_within(nm, s1, 0..n + 1),
                val_at(nm, s1, &int(0), &mut |_, t| eq(&t, &int(n))),
            ];
            for j in 1..=n {
                parts.push(val_at(nm, s, &int(j - 1), &mut |nm, a| val_at(nm, s1, &int(j), &mut |_, b| eq(&a, &b))));
            }
            and(parts)
        }
        NodeKind::Computation { map, next: id } => {
            let tape = Tape::for_map(map);
            let assigned: Vec<i64> = tape.results.keys().copied().collect();
            let mut parts = vec![eq(&next.node, &node_atom(m, id)), tape_check(nm, &tape, &cur.tape, s), sparse(nm, s1)];
            for (&i, &r) in &tape.results {
                let w = cur.tape.clone();
                parts.push(val_at(nm, s1, &int(i), &mut |_, t| has_pair(&int(r as i64), &t, &w)));
            }
            for (from, to) in [(s, s1), (s1, s)] {
                let to = to.clone();
                let a = assigned.clone();
                parts.push(all_pairs(nm, from, &mut |_, p, i, _| or(vec![one_of(&i, a.clone()), member(p, to.clone())])));
            }
            and(parts)
        }
        NodeKind::Branch { test, if_nonneg, if_neg } => {
            let tape = Tape::for_test(test);
            let r = tape.results[&0] as i64;
            let (yes, no) = (node_atom(m, if_nonneg), node_atom(m, if_neg));
            let nd = next.node.clone();
            and(vec![
                tape_check(nm, &tape, &cur.tape, s),
                eq(s, s1),
                lookup(nm, &cur.tape, &int(r), &mut |_, h| {
                    or(vec![
                        and(vec![not(less(&h, &int(0))), eq(&nd, &yes)]),
                        and(vec![less(&h, &int(0)), eq(&nd, &no)]),
                    ])
                }),
            ])
        }
        NodeKind::Shift { direction, next: id } => {
            let off = int(direction.offset());
            let mut parts = vec![eq(&next.node, &node_atom(m, id)), sparse(nm, s1)];
            for (from, to, forward) in [(s, s1, true), (s1, s, false)] {
                let (to, off) = (to.clone(), off.clone());
                parts.push(all_pairs(nm, from, &mut |nm, _, i, x| {
                    let (i, x, off) = (i.clone(), x.clone(), off.clone());
                    some_pair(nm, &to, &mut |_, _, i2, x2| {
                        let moved = if forward { add(&i, &off, &i2) } else { add(&i2, &off, &i) };
                        and(vec![moved, eq(&x, &x2)])
                    })
                }));
            }
            and(parts)
        }
        NodeKind::Output { .. } => crate::hf::formula::falsity(),
    }
}

/// `y` is the code of the output read off `s` at `coords`.
fn output_match(nm: &mut Namer, coords: &[i64], s: &Term, y: &Term) -> Formula {
    let mut parts = vec![sparse_within(nm, y, 0..coords.len() as i64)];
    for (idx, &c) in coords.iter().enumerate() {
        let y = y.clone();
        parts.push(val_at(nm, s, &int(c), &mut |nm, a| val_at(nm, &y, &int(idx as i64), &mut |_, b| eq(&a, &b))));
    }
    and(parts)
}

/// The raw input configuration holds the scalar codes `x1..xn` at
/// coordinates `0..n`.
fn input_match(nm: &mut Namer, n: usize, s: &Term) -> Formula {
    let mut parts = vec![sparse_within(nm, s, 0..n as i64)];
    for j in 0..n {
        let x = v(&input_var(j + 1));
        parts.push(sparse_within(nm, &x, 0..1));
        parts.push(val_at(nm, &x, &int(0), &mut |nm, a| val_at(nm, s, &int(j as i64), &mut |_, b| eq(&a, &b))));
    }
    and(parts)
}

/// `ValidTrace(c, x̄, y)`; with `negate_output` the final state must
/// disagree with `y` instead.
pub fn valid_trace(m: &Machine, negate_output: bool) -> Formula {
    let mut nm = Namer::with_prefix("_");
    let c = v(TRACE_VAR);
    let y = v(OUTPUT_VAR);
    let n = m.arity();
    let outputs: Vec<Term> = m
        .nodes()
        .values()
        .filter(|nd| matches!(nd.kind, NodeKind::Output { .. }))
        .map(|nd| node_atom(m, &nd.id))
        .collect();
    let input = node_atom(m, m.input_node());

    let start = some_pair(&mut nm, &c, &mut |_, _, k, _| is_zero(&k));
    let body = entry(&mut nm, &c, true, &mut |nm, p, st| {
        let uniq = {
            let (p, k) = (p.clone(), st.k.clone());
            all_pairs(nm, &c, &mut |_, p2, k2, _| or(vec![not(eq(&k, &k2)), eq(&p, &p2)]))
        };
        let origin = or(vec![
            and(vec![is_zero(&st.k), eq(&st.node, &input), input_match(nm, n, &st.state)]),
            and(vec![
                not(is_zero(&st.k)),
                entry(nm, &c, false, &mut |_, _, prev| {
                    let halted = or(outputs.iter().map(|o| eq(&prev.node, o)).collect());
                    and(vec![add(&prev.k, &int(1), &st.k), not(halted)])
                }),
            ]),
        ]);
        let mut cases = Vec::new();
        for (id, node) in m.nodes() {
            let here = eq(&st.node, &node_atom(m, id));
            let rest = match &node.kind {
                NodeKind::Output { coords } => {
                    let f = output_match(nm, coords, &st.state, &y);
                    if negate_output {
                        not(f)
                    } else {
                        f
                    }
                }
                kind => entry(nm, &c, false, &mut |nm, _, next| {
                    and(vec![add(&st.k, &int(1), &next.k), step_clause(nm, m, kind, &st, &next)])
                }),
            };
            cases.push(and(vec![here, rest]));
        }
        and(vec![sparse(nm, &st.state), uniq, origin, or(cases)])
    });
    and(vec![start, body])
}

/// `∃c ValidTrace`, with the cograph when the machine is declared total.
pub fn graph_formula(m: &Machine, total: bool) -> SigmaFunctionDef {
    let outputs = m
        .nodes()
        .values()
        .filter_map(|nd| match &nd.kind {
            NodeKind::Output { coords } => Some(coords.len()),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    SigmaFunctionDef {
        name: m.name().to_string(),
        arity: m.arity(),
        outputs,
        graph: exists(TRACE_VAR, valid_trace(m, false)),
        cograph: total.then(|| exists(TRACE_VAR, valid_trace(m, true))),
    }
}

/// Witnesses for evaluating a graph formula at `input`: the trace code.
pub fn seeds(m: &Machine, input: &[Scalar], fuel: usize) -> Vec<HfSet> {
    trace_code(m, &input.to_vec(), fuel).into_iter().collect()
}
