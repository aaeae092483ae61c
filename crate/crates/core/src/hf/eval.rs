//! Evaluation of Δ₀ formulas and budgeted witness search for Σ formulas.
//!
//! Atoms are urelements inside formulas: a bounded quantifier whose bound
//! evaluates to an atom ranges over nothing, and `(in t a)` is false for an
//! atom `a`.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet};

use crate::machine::RInfinity;
use crate::scalar::Scalar;

use super::encode::{encode, encode_seq};
use super::formula::{and, bforall, equal, member, or, BasePred, Formula, Term};
use super::set::HfSet;
use super::HfError;

/// Values of the free variables.
pub type Assignment = BTreeMap<String, HfSet>;

#[derive(Clone, Copy)]
enum Scope<'a> {
    Root(&'a Assignment),
    Bind(&'a str, &'a HfSet, &'a Scope<'a>),
}

impl<'a> Scope<'a> {
    fn lookup(&self, x: &str) -> Option<&'a HfSet> {
        let mut s = *self;
        loop {
            match s {
                Scope::Root(env) => return env.get(x),
                Scope::Bind(name, v, parent) => {
                    if name == x {
                        return Some(v);
                    }
                    s = *parent;
                }
            }
        }
    }
}

fn eval_term<'a>(t: &'a Term, sc: &Scope<'a>) -> Result<Cow<'a, HfSet>, HfError> {
    match t {
        Term::Var(x) => sc.lookup(x).map(Cow::Borrowed).ok_or_else(|| HfError::Unbound(x.clone())),
        Term::Lit(s) => Ok(Cow::Borrowed(s)),
        Term::Set(ts) => {
            let es = ts.iter().map(|t| eval_term(t, sc).map(Cow::into_owned)).collect::<Result<Vec<_>, _>>()?;
            Ok(Cow::Owned(HfSet::set(es)))
        }
    }
}

/// `t = v` without materialising `t`.
fn matches(t: &Term, v: &HfSet, sc: &Scope<'_>) -> Result<bool, HfError> {
    let Term::Set(ts) = t else { return Ok(*eval_term(t, sc)? == *v) };
    let HfSet::Set(es) = v else { return Ok(false) };
    for ti in ts {
        let mut found = false;
        for e in es {
            if matches(ti, e, sc)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    for e in es {
        let mut found = false;
        for ti in ts {
            if matches(ti, e, sc)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

fn base_arg(t: &Term, sc: &Scope<'_>) -> Result<Scalar, HfError> {
    let v = eval_term(t, sc)?;
    v.singleton_atom()
        .cloned()
        .ok_or_else(|| HfError::Type(format!("predicate argument `{t}` is {v}, not a singleton of an atom")))
}

fn eval_base(p: BasePred, args: &[Term], sc: &Scope<'_>) -> Result<bool, HfError> {
    if args.len() != p.arity() {
        return Err(HfError::Type(format!("`{}` takes {} arguments", p.keyword(), p.arity())));
    }
    let v = args.iter().map(|t| base_arg(t, sc)).collect::<Result<Vec<_>, _>>()?;
    Ok(match p {
        BasePred::Less => v[0] < v[1],
        BasePred::Add => &v[0] + &v[1] == v[2],
        BasePred::Mul => &v[0] * &v[1] == v[2],
        BasePred::IsZero => v[0].is_zero(),
        BasePred::IsOne => v[0].is_one(),
    })
}

fn delta0<'a>(f: &'a Formula, sc: &Scope<'a>) -> Result<bool, HfError> {
    match f {
        Formula::Member(t, s) => {
            let (t, s) = (eval_term(t, sc)?, eval_term(s, sc)?);
            Ok(s.contains(&t))
        }
        Formula::Equal(t, s) => match (t, s) {
            (Term::Set(_), Term::Var(_) | Term::Lit(_)) => matches(t, &*eval_term(s, sc)?, sc),
            (Term::Var(_) | Term::Lit(_), Term::Set(_)) => matches(s, &*eval_term(t, sc)?, sc),
            _ => Ok(eval_term(t, sc)? == eval_term(s, sc)?),
        },
        Formula::Base(p, args) => eval_base(*p, args, sc),
        Formula::And(fs) => {
            for g in fs {
                if !delta0(g, sc)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for g in fs {
                if delta0(g, sc)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Not(g) => Ok(!delta0(g, sc)?),
        Formula::BExists(x, t, body) => {
            let bound = eval_term(t, sc)?;
            for e in bound.members() {
                if delta0(body, &Scope::Bind(x, e, sc))? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::BForall(x, t, body) => {
            let bound = eval_term(t, sc)?;
            for e in bound.members() {
                if !delta0(body, &Scope::Bind(x, e, sc))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Exists(..) => Err(HfError::WrongClass("Δ₀")),
    }
}

/// Decides a Δ₀ formula. Predicate arguments that are not singletons of
/// atoms are type errors.
pub fn eval_delta0(f: &Formula, env: &Assignment) -> Result<bool, HfError> {
    if !f.is_delta0() {
        return Err(HfError::WrongClass("Δ₀"));
    }
    delta0(f, &Scope::Root(env))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Cap on the candidate list tried for each unbounded existential.
    pub max_witnesses: usize,
    pub atom_pool: Vec<Scalar>,
    pub max_rank: usize,
    /// Tried before anything generated.
    pub seeds: Vec<HfSet>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_witnesses: 2000,
            atom_pool: [0, 1, -1, 2].into_iter().map(Scalar::from_int).chain([Scalar::new(1, 2)]).collect(),
            max_rank: 2,
            seeds: Vec::new(),
        }
    }
}

impl SearchBudget {
    pub fn with_pool(pool: Vec<Scalar>) -> Self {
        SearchBudget { atom_pool: pool, ..SearchBudget::default() }
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = HfSet>) -> Self {
        self.seeds.extend(seeds);
        self
    }

    /// The candidates in search order: seeds, pool atoms, flat and tree
    /// codes of vectors over the pool on coordinates `0..=max_rank`, then
    /// pure sets over the pool by rank and size.
    pub fn candidates(&self) -> Vec<HfSet> {
        let cap = self.max_witnesses;
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |x: HfSet, out: &mut Vec<HfSet>| {
            if out.len() < cap && seen.insert(x.clone()) {
                out.push(x);
            }
            out.len() >= cap
        };
        for s in &self.seeds {
            if push(s.clone(), &mut out) {
                return out;
            }
        }
        for a in &self.atom_pool {
            if push(HfSet::Atom(a.clone()), &mut out) {
                return out;
            }
        }
        let values: Vec<Scalar> = self.atom_pool.iter().filter(|a| !a.is_zero()).cloned().collect();
        let coords = if values.is_empty() { 0 } else { self.max_rank + 1 };
        for size in 1..=coords {
            for_each_combination(coords, size, &mut |idx| {
                let mut digits = vec![0usize; size];
                loop {
                    let v = RInfinity::from_pairs(idx.iter().zip(&digits).map(|(&i, &d)| (i as i64, values[d].clone())));
                    if push(encode_seq(&v), &mut out) {
                        return false;
                    }
                    if let Ok(e) = encode(&v) {
                        if push(e, &mut out) {
                            return false;
                        }
                    }
                    if !next_digits(&mut digits, values.len()) {
                        return true;
                    }
                }
            });
            if out.len() >= cap {
                return out;
            }
        }
        let mut universe: Vec<HfSet> = self.atom_pool.iter().map(|a| HfSet::Atom(a.clone())).collect();
        universe.push(HfSet::empty());
        if push(HfSet::empty(), &mut out) {
            return out;
        }
        for r in 1..=self.max_rank {
            let mut fresh = Vec::new();
            let n = universe.len();
            for size in 1..=n {
                let done = !for_each_combination(n, size, &mut |idx| {
                    if !idx.iter().any(|&i| universe[i].rank() + 1 == r) {
                        return true;
                    }
                    let s = HfSet::set(idx.iter().map(|&i| universe[i].clone()));
                    fresh.push(s.clone());
                    !push(s, &mut out)
                });
                if done {
                    return out;
                }
            }
            universe.extend(fresh);
        }
        out
    }
}

/// Visits `size`-subsets of `0..n` in lexicographic order until `f`
/// returns false. Returns false if stopped early.
fn for_each_combination(n: usize, size: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if size > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        let mut i = size;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < n - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn next_digits(d: &mut [usize], base: usize) -> bool {
    for x in d.iter_mut() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

/// Evidence for a Σ formula: the witness chosen for each unbounded
/// existential on the successful branch, and a Δ₀ formula obtained by
/// instantiating them. The Δ₀ formula implies the original one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub bindings: Vec<(String, HfSet)>,
    pub matrix: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaOutcome {
    True(Certificate),
    Unknown,
}

impl SigmaOutcome {
    pub fn is_true(&self) -> bool {
        matches!(self, SigmaOutcome::True(_))
    }
}

/// Budgeted witness search. `True` is returned only after the instantiated
/// matrix has been checked with [`eval_delta0`].
pub fn eval_sigma(f: &Formula, env: &Assignment, budget: &SearchBudget) -> Result<SigmaOutcome, HfError> {
    if !f.is_sigma() {
        return Err(HfError::WrongClass("Σ"));
    }
    let cands = if f.is_delta0() { Vec::new() } else { budget.candidates() };
    let mut binds = Vec::new();
    let Some(matrix) = sigma(f, &Scope::Root(env), &cands, &mut binds)? else {
        return Ok(SigmaOutcome::Unknown);
    };
    match eval_delta0(&matrix, env) {
        Ok(true) => Ok(SigmaOutcome::True(Certificate { bindings: binds, matrix })),
        _ => Ok(SigmaOutcome::Unknown),
    }
}

fn sigma<'a>(
    f: &'a Formula,
    sc: &Scope<'a>,
    cands: &'a [HfSet],
    binds: &mut Vec<(String, HfSet)>,
) -> Result<Option<Formula>, HfError> {
    if f.is_delta0() {
        return match delta0(f, sc) {
            Ok(true) => Ok(Some(f.clone())),
            Ok(false) | Err(HfError::Type(_)) => Ok(None),
            Err(e) => Err(e),
        };
    }
    let mark = binds.len();
    match f {
        Formula::And(fs) => {
            let mut gs = Vec::with_capacity(fs.len());
            for g in fs {
                match sigma(g, sc, cands, binds)? {
                    Some(h) => gs.push(h),
                    None => {
                        binds.truncate(mark);
                        return Ok(None);
                    }
                }
            }
            Ok(Some(and(gs)))
        }
        Formula::Or(fs) => {
            for g in fs {
                if let Some(h) = sigma(g, sc, cands, binds)? {
                    return Ok(Some(h));
                }
            }
            Ok(None)
        }
        Formula::BExists(x, t, body) => {
            let bound = eval_term(t, sc)?;
            for e in bound.members() {
                if let Some(h) = sigma(body, &Scope::Bind(x, e, sc), cands, binds)? {
                    let lit = Term::Lit(e.clone());
                    return Ok(Some(and(vec![member(lit.clone(), t.clone()), h.subst(x, &lit)])));
                }
            }
            Ok(None)
        }
        Formula::BForall(x, t, body) => {
            let bound = eval_term(t, sc)?;
            let mut cases = Vec::new();
            for e in bound.members() {
                match sigma(body, &Scope::Bind(x, e, sc), cands, binds)? {
                    Some(h) => {
                        let lit = Term::Lit(e.clone());
                        cases.push(and(vec![equal(Term::Var(x.clone()), lit.clone()), h.subst(x, &lit)]));
                    }
                    None => {
                        binds.truncate(mark);
                        return Ok(None);
                    }
                }
            }
            Ok(Some(bforall(x, t.clone(), or(cases))))
        }
        Formula::Exists(x, body) => {
            for c in cands {
                binds.push((x.clone(), c.clone()));
                if let Some(h) = sigma(body, &Scope::Bind(x, c, sc), cands, binds)? {
                    return Ok(Some(h.subst(x, &Term::Lit(c.clone()))));
                }
                binds.truncate(mark);
            }
            Ok(None)
        }
        Formula::Member(..) | Formula::Equal(..) | Formula::Base(..) | Formula::Not(_) => {
            unreachable!("Δ₀ handled above")
        }
    }
}
