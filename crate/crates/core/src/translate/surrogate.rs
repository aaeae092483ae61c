//! A sampled check that existential statements over the ordered field,
//! with parameters taken from machines, keep their truth when the witness
//! must be rational.
//!
//! Each probe is `∃y φ(y, a, b)` with `φ` quantifier-free. Its truth over
//! the reals is given in closed form; the rational side searches a grid
//! plus values derived from the parameters and checks `φ` exactly.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::machine::{run, Machine, NodeKind};
use crate::Scalar;

pub struct Probe {
    pub name: &'static str,
    pub text: &'static str,
    pub matrix: fn(&Scalar, &Scalar, &Scalar) -> bool,
    pub real_truth: fn(&Scalar, &Scalar) -> bool,
}

fn z() -> Scalar {
    Scalar::zero()
}

fn one() -> Scalar {
    Scalar::one()
}

macro_rules! probe {
    ($name:literal, $text:literal, |$y:ident, $a:ident, $b:ident| $m:expr, |$ra:ident, $rb:ident| $r:expr) => {
        Probe {
            name: $name,
            text: $text,
            matrix: |$y: &Scalar, $a: &Scalar, $b: &Scalar| $m,
            real_truth: |$ra: &Scalar, $rb: &Scalar| $r,
        }
    };
}

#[allow(unused_variables)]
pub fn battery() -> Vec<Probe> {
    vec![
        probe!("between", "a < y < b", |y, a, b| a < y && y < b, |a, b| a < b),
        probe!("square-below", "y*y < a", |y, a, b| &(y * y) < a, |a, b| a > &z()),
        probe!("square-at-most", "y*y <= a", |y, a, b| &(y * y) <= a, |a, b| a >= &z()),
        probe!("solve-linear", "a*y = b", |y, a, b| &(a * y) == b, |a, b| !a.is_zero() || b.is_zero()),
        probe!("difference", "a + y = b", |y, a, b| &(a + y) == b, |a, b| true),
        probe!("above-both", "y > a and y > b", |y, a, b| y > a && y > b, |a, b| true),
        probe!("square-above", "y*y > a", |y, a, b| &(y * y) > a, |a, b| true),
        probe!("positive-inverse", "a*y = 1 and y > 0", |y, a, b| (a * y).is_one() && y > &z(), |a, b| a > &z()),
        probe!("below-in-unit", "y < a and y*y < 1", |y, a, b| y < a && (y * y) < one(), |a, b| a > &-one()),
        probe!("strictly-inside", "y*(y - a) < 0", |y, a, b| (y * &(y - a)) < z(), |a, b| !a.is_zero()),
        probe!("avoid-both", "y != a and y != b", |y, a, b| y != a && y != b, |a, b| true),
        probe!(
            "off-centre",
            "a < y < b and y + y != a + b",
            |y, a, b| a < y && y < b && &(y + y) != &(a + b),
            |a, b| a < b
        ),
        probe!("negative-root", "y*y = a*a and y < 0", |y, a, b| (y * y) == (a * a) && y < &z(), |a, b| !a.is_zero()),
        probe!("half", "y + y = a", |y, a, b| &(y + y) == a, |a, b| true),
        probe!(
            "small-quotient",
            "y*b = a and y*y < 1",
            |y, a, b| &(y * b) == a && (y * y) < one(),
            |a, b| if b.is_zero() { a.is_zero() } else { (a * a) < (b * b) }
        ),
        probe!(
            "square-window",
            "a < y*y < b",
            |y, a, b| a < &(y * y) && &(y * y) < b,
            |a, b| b > &z() && b > a
        ),
        probe!(
            "cube-gap",
            "y*y*y < a and y > b",
            |y, a, b| &(&(y * y) * y) < a && y > b,
            |a, b| &(&(b * b) * b) < a
        ),
        probe!(
            "small-positive",
            "0 < y < a and y*y < b",
            |y, a, b| &z() < y && y < a && &(y * y) < b,
            |a, b| a > &z() && b > &z()
        ),
        probe!(
            "quadratic-negative",
            "a*y*y + b*y < 0",
            |y, a, b| (&(&(a * y) * y) + &(b * y)) < z(),
            |a, b| !b.is_zero() || a < &z()
        ),
        probe!("separates", "(y - a)*(y - b) < 0", |y, a, b| (&(y - a) * &(y - b)) < z(), |a, b| a != b),
    ]
}

/// Rationals tried as witnesses for parameters `a, b`: values derived
/// from the parameters first, then a grid of small fractions.
pub fn candidate_pool(a: &Scalar, b: &Scalar) -> Vec<Scalar> {
    let two = Scalar::from_int(2);
    let half = |x: &Scalar| x.checked_div(&two).unwrap();
    let mut derived = vec![a.clone(), b.clone(), -a, -b, a + b, a - b, b - a, a * b, half(&(a + b)), half(a), half(b)];
    derived.extend([half(&(a - &one())), half(&(b + &one())), a + &one(), a - &one(), b + &one(), b - &one()]);
    derived.push(half(&(half(&(a + b)) + a)));
    derived.push(half(&(half(&(a + b)) + b)));
    for (p, q) in [(a, b), (b, a)] {
        if let Some(r) = p.recip() {
            derived.push(r);
        }
        if let Some(r) = q.checked_div(p) {
            derived.push(r.clone());
            derived.push(-half(&r));
        }
    }
    derived.extend(root_windows(a, b));
    let radius = 2 + i64::try_from(&Scalar::max(&a.abs(), &b.abs()).ceil()).unwrap_or(64).min(64);
    let grid = (1..=12i64).flat_map(|q| (-radius * q..=radius * q).map(move |p| Scalar::new(p, q)));
    let mut seen = std::collections::HashSet::new();
    derived.into_iter().chain(grid).filter(|x| seen.insert(x.clone())).collect()
}

/// Bisects `(lo, hi)` at midpoints until `side` reports a hit
/// (`Equal`). `Less` moves the lower end up, `Greater` the upper end down.
fn bisect(mut lo: Scalar, mut hi: Scalar, side: impl Fn(&Scalar) -> Ordering) -> Option<Scalar> {
    let two = Scalar::from_int(2);
    for _ in 0..256 {
        let m = (&lo + &hi).checked_div(&two)?;
        match side(&m) {
            Ordering::Equal => return Some(m),
            Ordering::Less => lo = m,
            Ordering::Greater => hi = m,
        }
    }
    None
}

/// Rationals inside windows bounded by square and cube roots of the
/// parameters, which grid search misses once the parameters are large.
fn root_windows(a: &Scalar, b: &Scalar) -> Vec<Scalar> {
    let mut out = Vec::new();
    // a < y*y < b
    if b > &z() && b > a {
        let hi = Scalar::max(&one(), b);
        out.extend(bisect(z(), hi, |m| {
            let sq = m * m;
            if &sq <= a {
                Ordering::Less
            } else if &sq >= b {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }));
    }
    // b < y with y*y*y < a
    if &(&(b * b) * b) < a {
        let hi = Scalar::max(b, &z()) + Scalar::max(&one(), &a.abs());
        out.extend(bisect(b.clone(), hi, |m| if &(&(m * m) * m) >= a { Ordering::Greater } else { Ordering::Equal }));
    }
    // 0 < y < a with y*y < b
    if a > &z() && b > &z() {
        out.extend(bisect(z(), a.clone(), |m| if &(m * m) >= b { Ordering::Greater } else { Ordering::Equal }));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub probe: &'static str,
    pub a: Scalar,
    pub b: Scalar,
    pub real: bool,
    pub witness: Option<Scalar>,
}

impl ProbeReport {
    /// True over the reals but no rational witness was found.
    pub fn violated(&self) -> bool {
        self.real && self.witness.is_none()
    }
}

pub fn check(probe: &Probe, a: &Scalar, b: &Scalar) -> ProbeReport {
    check_in(probe, a, b, &candidate_pool(a, b))
}

fn check_in(probe: &Probe, a: &Scalar, b: &Scalar, pool: &[Scalar]) -> ProbeReport {
    let real = (probe.real_truth)(a, b);
    let witness = pool.iter().find(|y| (probe.matrix)(y, a, b)).cloned();
    ProbeReport { probe: probe.name, a: a.clone(), b: b.clone(), real, witness }
}

/// Constants of the machine's maps and tests, plus its outputs at `inputs`.
pub fn machine_parameters(m: &Machine, inputs: &[Vec<Scalar>], fuel: usize) -> Vec<Scalar> {
    let mut out: BTreeSet<Scalar> = BTreeSet::new();
    for node in m.nodes().values() {
        let polys: Vec<&crate::machine::Poly> = match &node.kind {
            NodeKind::Computation { map, .. } => map.assignments().values().flat_map(|(n, d)| [n, d]).collect(),
            NodeKind::Branch { test, .. } => vec![test],
            _ => Vec::new(),
        };
        for p in polys {
            out.extend(p.terms().map(|(_, c)| c.clone()));
        }
    }
    for x in inputs {
        if let Some(v) = run(m, x, fuel).output() {
            out.extend(v.iter().cloned());
        }
    }
    out.into_iter().collect()
}

/// Runs the whole battery on every ordered pair of parameters.
pub fn run_battery(params: &[Scalar]) -> Vec<ProbeReport> {
    let probes = battery();
    let mut out = Vec::new();
    for a in params {
        for b in params {
            let pool = candidate_pool(a, b);
            for p in &probes {
                out.push(check_in(p, a, b, &pool));
            }
        }
    }
    out
}
