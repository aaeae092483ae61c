//! Formulas over HF with lifted field predicates, and their s-expression
//! syntax.
//!
//! ```text
//! (exists y (mul ({y}) ({y}) ({4/1})))
//! (forall-in x s (or (in x t) (= x {})))
//! ```
//!
//! Terms are identifiers, rational literals standing for atoms (`3/4`,
//! `atom(3/4)`), and set builders `{t1, t2}`. A builder whose elements are
//! all literals is folded into a literal set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::scalar::Scalar;

use super::set::HfSet;
use super::HfError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lit(HfSet),
    /// `{t1, ..., tn}` with at least one non-literal element.
    Set(Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn atom(x: impl Into<Scalar>) -> Self {
        Term::Lit(HfSet::atom(x))
    }

    /// Builds `{t1, ..., tn}`, folding to a literal when possible.
    pub fn set(ts: Vec<Term>) -> Self {
        if ts.iter().all(|t| matches!(t, Term::Lit(_))) {
            Term::Lit(HfSet::set(ts.into_iter().map(|t| match t {
                Term::Lit(s) => s,
                _ => unreachable!(),
            })))
        } else {
            Term::Set(ts)
        }
    }

    pub fn singleton(t: Term) -> Self {
        Term::set(vec![t])
    }

    /// `{{i}, {{x}}}`.
    pub fn pair(i: Term, x: Term) -> Self {
        Term::set(vec![Term::singleton(i), Term::singleton(Term::singleton(x))])
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Lit(_) => {}
            Term::Set(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::Lit(_) => false,
            Term::Set(ts) => ts.iter().any(|t| t.mentions(x)),
        }
    }

    pub fn subst(&self, x: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == x => by.clone(),
            Term::Var(_) | Term::Lit(_) => self.clone(),
            Term::Set(ts) => Term::set(ts.iter().map(|t| t.subst(x, by)).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasePred {
    Less,
    Add,
    Mul,
    IsZero,
    IsOne,
}

impl BasePred {
    pub fn arity(self) -> usize {
        match self {
            BasePred::Less => 2,
            BasePred::Add | BasePred::Mul => 3,
            BasePred::IsZero | BasePred::IsOne => 1,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            BasePred::Less => "less",
            BasePred::Add => "add",
            BasePred::Mul => "mul",
            BasePred::IsZero => "zero",
            BasePred::IsOne => "one",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "less" => BasePred::Less,
            "add" => BasePred::Add,
            "mul" => BasePred::Mul,
            "zero" => BasePred::IsZero,
            "one" => BasePred::IsOne,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Member(Term, Term),
    Equal(Term, Term),
    Base(BasePred, Vec<Term>),
    /// Empty conjunction is true.
    And(Vec<Formula>),
    /// Empty disjunction is false.
    Or(Vec<Formula>),
    Not(Box<Formula>),
    BExists(String, Term, Box<Formula>),
    BForall(String, Term, Box<Formula>),
    Exists(String, Box<Formula>),
}

pub fn and(fs: Vec<Formula>) -> Formula {
    if fs.len() == 1 {
        return fs.into_iter().next().expect("one");
    }
    Formula::And(fs)
}

pub fn or(fs: Vec<Formula>) -> Formula {
    if fs.len() == 1 {
        return fs.into_iter().next().expect("one");
    }
    Formula::Or(fs)
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn member(t: Term, s: Term) -> Formula {
    Formula::Member(t, s)
}

pub fn equal(t: Term, s: Term) -> Formula {
    Formula::Equal(t, s)
}

pub fn base(p: BasePred, args: Vec<Term>) -> Formula {
    Formula::Base(p, args)
}

pub fn bexists(x: &str, bound: Term, body: Formula) -> Formula {
    Formula::BExists(x.to_string(), bound, Box::new(body))
}

pub fn bforall(x: &str, bound: Term, body: Formula) -> Formula {
    Formula::BForall(x.to_string(), bound, Box::new(body))
}

pub fn exists(x: &str, body: Formula) -> Formula {
    Formula::Exists(x.to_string(), Box::new(body))
}

pub fn truth() -> Formula {
    Formula::And(Vec::new())
}

pub fn falsity() -> Formula {
    Formula::Or(Vec::new())
}

impl Formula {
    /// No unbounded existential anywhere.
    pub fn is_delta0(&self) -> bool {
        match self {
            Formula::Member(..) | Formula::Equal(..) | Formula::Base(..) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_delta0),
            Formula::Not(f) => f.is_delta0(),
            Formula::BExists(_, _, f) | Formula::BForall(_, _, f) => f.is_delta0(),
            Formula::Exists(..) => false,
        }
    }

    /// Δ₀ formulas closed under ∧, ∨, bounded quantifiers and ∃.
    pub fn is_sigma(&self) -> bool {
        match self {
            Formula::Member(..) | Formula::Equal(..) | Formula::Base(..) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_sigma),
            Formula::Not(f) => f.is_delta0(),
            Formula::BExists(_, _, f) | Formula::BForall(_, _, f) | Formula::Exists(_, f) => f.is_sigma(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Member(a, b) | Formula::Equal(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Base(_, ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(out)),
            Formula::Not(f) => f.collect_free(out),
            Formula::BExists(x, t, f) | Formula::BForall(x, t, f) => {
                t.collect_vars(out);
                let mut inner = f.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
            Formula::Exists(x, f) => {
                let mut inner = f.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    fn binders(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Member(..) | Formula::Equal(..) | Formula::Base(..) => {}
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.binders(out)),
            Formula::Not(f) => f.binders(out),
            Formula::BExists(x, _, f) | Formula::BForall(x, _, f) | Formula::Exists(x, f) => {
                out.insert(x.clone());
                f.binders(out);
            }
        }
    }

    /// Every variable name occurring free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = self.free_vars();
        self.binders(&mut out);
        out
    }

    /// Capture-avoiding substitution of `by` for the free occurrences of `x`.
    pub fn subst(&self, x: &str, by: &Term) -> Formula {
        let mut by_vars = BTreeSet::new();
        by.collect_vars(&mut by_vars);
        self.subst_inner(x, by, &by_vars)
    }

    fn subst_inner(&self, x: &str, by: &Term, by_vars: &BTreeSet<String>) -> Formula {
        let st = |t: &Term| t.subst(x, by);
        match self {
            Formula::Member(a, b) => Formula::Member(st(a), st(b)),
            Formula::Equal(a, b) => Formula::Equal(st(a), st(b)),
            Formula::Base(p, ts) => Formula::Base(*p, ts.iter().map(st).collect()),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst_inner(x, by, by_vars)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.subst_inner(x, by, by_vars)).collect()),
            Formula::Not(f) => not(f.subst_inner(x, by, by_vars)),
            Formula::BExists(v, t, f) | Formula::BForall(v, t, f) => {
                let bound = st(t);
                let (v2, body) = self.rebind(v, f, x, by, by_vars);
                if matches!(self, Formula::BExists(..)) {
                    Formula::BExists(v2, bound, Box::new(body))
                } else {
                    Formula::BForall(v2, bound, Box::new(body))
                }
            }
            Formula::Exists(v, f) => {
                let (v2, body) = self.rebind(v, f, x, by, by_vars);
                Formula::Exists(v2, Box::new(body))
            }
        }
    }

    fn rebind(&self, v: &str, body: &Formula, x: &str, by: &Term, by_vars: &BTreeSet<String>) -> (String, Formula) {
        if v == x || !body.free_vars().contains(x) {
            return (v.to_string(), body.clone());
        }
        if !by_vars.contains(v) {
            return (v.to_string(), body.subst_inner(x, by, by_vars));
        }
        let mut taken = body.all_vars();
        taken.extend(by_vars.iter().cloned());
        taken.insert(x.to_string());
        let fresh = fresh_name(v, &taken);
        let renamed = body.subst_inner(v, &Term::Var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
        (fresh.clone(), renamed.subst_inner(x, by, by_vars))
    }

    /// Substitutes several variables one after another.
    pub fn subst_all(&self, pairs: &[(&str, Term)]) -> Formula {
        pairs.iter().fold(self.clone(), |f, (x, t)| f.subst(x, t))
    }

    pub fn mentions_free(&self, x: &str) -> bool {
        match self {
            Formula::Member(a, b) | Formula::Equal(a, b) => a.mentions(x) || b.mentions(x),
            Formula::Base(_, ts) => ts.iter().any(|t| t.mentions(x)),
            _ => self.free_vars().contains(x),
        }
    }
}

/// `base` with a numeric suffix not in `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..).map(|i| format!("{stem}_{i}")).find(|n| !taken.contains(n)).expect("unbounded")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Lit(s) => write_lit(s, f),
            Term::Set(ts) => {
                f.write_str("{")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("}")
            }
        }
    }
}

fn write_lit(s: &HfSet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match s {
        HfSet::Atom(a) => f.write_str(&a.to_pq()),
        HfSet::Set(es) => {
            f.write_str("{")?;
            for (i, e) in es.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_lit(e, f)?;
            }
            f.write_str("}")
        }
    }
}

/// Argument position: brace terms are wrapped in parentheses.
struct Arg<'a>(&'a Term);

impl fmt::Display for Arg<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Var(_) | Term::Lit(HfSet::Atom(_)) => write!(f, "{}", self.0),
            _ => write!(f, "({})", self.0),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Member(a, b) => write!(f, "(in {} {})", Arg(a), Arg(b)),
            Formula::Equal(a, b) => write!(f, "(= {} {})", Arg(a), Arg(b)),
            Formula::Base(p, ts) => {
                f.write_str("(")?;
                f.write_str(p.keyword())?;
                for t in ts {
                    write!(f, " {}", Arg(t))?;
                }
                f.write_str(")")
            }
            Formula::And(fs) | Formula::Or(fs) => {
                f.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                f.write_str(")")
            }
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::BExists(x, t, g) => write!(f, "(exists-in {x} {} {g})", Arg(t)),
            Formula::BForall(x, t, g) => write!(f, "(forall-in {x} {} {g})", Arg(t)),
            Formula::Exists(x, g) => write!(f, "(exists {x} {g})"),
        }
    }
}

impl FromStr for Formula {
    type Err = HfError;

    fn from_str(s: &str) -> Result<Self, HfError> {
        let mut p = Parser { src: s, pos: 0 };
        let f = p.formula()?;
        p.ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(f)
    }
}

impl FromStr for Term {
    type Err = HfError;

    fn from_str(s: &str) -> Result<Self, HfError> {
        let mut p = Parser { src: s, pos: 0 };
        let t = p.term()?;
        p.ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '-'
}

impl Parser<'_> {
    fn ws(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with(';') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn err(&self, what: &str) -> HfError {
        let line = self.src[..self.pos].matches('\n').count() + 1;
        HfError::Parse(format!("{what} at line {line}, offset {}", self.pos))
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), HfError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> Option<&str> {
        self.ws();
        let rest = &self.src[self.pos..];
        let first = rest.chars().next()?;
        if !is_ident_start(first) && first != '=' {
            return None;
        }
        if first == '=' {
            self.pos += 1;
            return Some("=");
        }
        let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        self.pos += len;
        Some(&rest[..len])
    }

    fn ident(&mut self) -> Result<String, HfError> {
        match self.word().map(str::to_string) {
            Some(w) if w != "=" => Ok(w),
            _ => Err(self.err("expected a variable name")),
        }
    }

    fn formula(&mut self) -> Result<Formula, HfError> {
        self.expect('(')?;
        let Some(head) = self.word().map(str::to_string) else {
            return Err(self.err("expected a connective or predicate"));
        };
        let f = match head.as_str() {
            "and" | "or" => {
                let mut fs = Vec::new();
                while self.peek() == Some('(') {
                    fs.push(self.formula()?);
                }
                if head == "and" {
                    Formula::And(fs)
                } else {
                    Formula::Or(fs)
                }
            }
            "not" => not(self.formula()?),
            "in" => Formula::Member(self.term()?, self.term()?),
            "=" => Formula::Equal(self.term()?, self.term()?),
            "exists-in" | "forall-in" => {
                let x = self.ident()?;
                let t = self.term()?;
                let body = self.formula()?;
                if head == "exists-in" {
                    bexists(&x, t, body)
                } else {
                    bforall(&x, t, body)
                }
            }
            "exists" => {
                let x = self.ident()?;
                exists(&x, self.formula()?)
            }
            other => {
                let p = BasePred::from_keyword(other).ok_or_else(|| self.err(&format!("unknown head `{other}`")))?;
                let args = (0..p.arity()).map(|_| self.term()).collect::<Result<Vec<_>, _>>()?;
                Formula::Base(p, args)
            }
        };
        self.expect(')')?;
        Ok(f)
    }

    fn term(&mut self) -> Result<Term, HfError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(')')?;
                Ok(t)
            }
            Some('{') => {
                self.pos += 1;
                let mut ts = Vec::new();
                if self.peek() == Some('}') {
                    self.pos += 1;
                    return Ok(Term::Lit(HfSet::empty()));
                }
                loop {
                    ts.push(self.term()?);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some('}') => {
                            self.pos += 1;
                            return Ok(Term::set(ts));
                        }
                        _ => return Err(self.err("expected `,` or `}`")),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || c == '-' || c == '.' => {
                let rest = &self.src[self.pos..];
                let len = rest
                    .find(|c: char| !(c.is_ascii_digit() || c == '-' || c == '.' || c == '/'))
                    .unwrap_or(rest.len());
                let lit = &rest[..len];
                let x = Scalar::from_str(lit).map_err(|_| self.err(&format!("bad rational `{lit}`")))?;
                self.pos += len;
                Ok(Term::Lit(HfSet::Atom(x)))
            }
            Some(c) if is_ident_start(c) => {
                let rest = &self.src[self.pos..];
                if rest.starts_with("atom(") {
                    let end = rest.find(')').ok_or_else(|| self.err("unclosed `atom(`"))?;
                    let lit = rest[5..end].trim();
                    let x = Scalar::from_str(lit).map_err(|_| self.err(&format!("bad rational `{lit}`")))?;
                    self.pos += end + 1;
                    return Ok(Term::Lit(HfSet::Atom(x)));
                }
                let w = self.word().expect("identifier start").to_string();
                Ok(Term::Var(w))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}
