//! Straight-line programs that evaluate a node's rational map or branch
//! polynomial one field operation at a time. A trace stores every tape
//! cell, so the graph formula checks each operation locally.

use std::collections::BTreeMap;

use crate::machine::poly::Poly;
use crate::machine::{RInfinity, RationalMap};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TapeOp {
    /// Coordinate of the current state.
    Read(i64),
    Const(Scalar),
    Add(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tape {
    pub ops: Vec<TapeOp>,
    /// Cells holding the final values, keyed by coordinate for maps; a
    /// branch test stores its single result under coordinate 0.
    pub results: BTreeMap<i64, usize>,
}

impl Tape {
    fn push(&mut self, op: TapeOp) -> usize {
        self.ops.push(op);
        self.ops.len() - 1
    }

    fn poly(&mut self, p: &Poly, reads: &mut BTreeMap<i64, usize>) -> usize {
        let mut acc: Option<usize> = None;
        for (mono, c) in p.terms() {
            let mut cell = self.push(TapeOp::Const(c.clone()));
            for &(var, exp) in mono.factors() {
                let r = *reads.entry(var).or_insert_with(|| {
                    self.ops.push(TapeOp::Read(var));
                    self.ops.len() - 1
                });
                for _ in 0..exp {
                    cell = self.push(TapeOp::Mul(cell, r));
                }
            }
            acc = Some(match acc {
                None => cell,
                Some(a) => self.push(TapeOp::Add(a, cell)),
            });
        }
        acc.unwrap_or_else(|| self.push(TapeOp::Const(Scalar::zero())))
    }

    pub fn for_map(map: &RationalMap) -> Tape {
        let mut t = Tape::default();
        let mut reads = BTreeMap::new();
        for (&i, (num, den)) in map.assignments() {
            let n = t.poly(num, &mut reads);
            let cell = if den.as_constant().is_some_and(|c| c.is_one()) {
                n
            } else {
                let d = t.poly(den, &mut reads);
                t.push(TapeOp::Div(n, d))
            };
            t.results.insert(i, cell);
        }
        t
    }

    pub fn for_test(test: &Poly) -> Tape {
        let mut t = Tape::default();
        let cell = t.poly(test, &mut BTreeMap::new());
        t.results.insert(0, cell);
        t
    }

    /// Every cell's value on `state`, or `None` after a division by zero.
    pub fn run(&self, state: &RInfinity) -> Option<Vec<Scalar>> {
        let mut cells: Vec<Scalar> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let x = match op {
                TapeOp::Read(v) => state.get(*v),
                TapeOp::Const(c) => c.clone(),
                TapeOp::Add(a, b) => &cells[*a] + &cells[*b],
                TapeOp::Mul(a, b) => &cells[*a] * &cells[*b],
                TapeOp::Div(a, b) => cells[*a].checked_div(&cells[*b])?,
            };
            cells.push(x);
        }
        Some(cells)
    }
}
