//! Σ-definitions of machine-computable functions over hereditarily finite
//! sets, and the presentations built from them.
//!
//! A real `a` is represented by its scalar code `{(0, a)}` (the empty set
//! for 0) and an output tuple by the flat code of the vector `v_0, v_1, ...`.
//! Inputs are the free variables `x1..xn`; the output is `y`.

pub mod build;
pub mod combinators;
pub mod graph;
pub mod scheme;
pub mod surrogate;
pub mod tape;

use std::fmt;

use thiserror::Error;

use crate::hf::{encode_seq, Formula, HfError, HfSet};
use crate::machine::{RFinite, RInfinity};
use crate::Scalar;

pub use combinators::{compose, juxtapose, mu, primrec};
pub use graph::{graph_formula, trace_code};
pub use scheme::{
    build_m_prime, sigma_semidecide, structure_presentation, MPrime, MPrimeElement, SigmaScheme, StructureMachine,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("{0} has no cograph; declare it total")]
    MissingCograph(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("{0} must have a single output")]
    NotScalar(String),
    #[error("machine `{0}` is not declared total")]
    NotTotal(String),
    #[error("missing predicate `{0}`")]
    MissingPredicate(String),
    #[error("malformed presentation: {0}")]
    Format(String),
    #[error(transparent)]
    Hf(#[from] HfError),
}

/// The Σ-definition of a partial function `R^n -> R^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaFunctionDef {
    pub name: String,
    pub arity: usize,
    pub outputs: usize,
    /// Free in `x1..xn` and `y`.
    pub graph: Formula,
    /// Holds when the function is defined at `x̄` with a value other than `y`.
    pub cograph: Option<Formula>,
}

pub fn input_var(j: usize) -> String {
    format!("x{j}")
}

pub const OUTPUT_VAR: &str = "y";

pub fn scalar_code(a: &Scalar) -> HfSet {
    encode_seq(&RInfinity::from_pairs([(0, a.clone())]))
}

pub fn tuple_code(v: &RFinite) -> HfSet {
    encode_seq(&RInfinity::from_pairs(v.iter().enumerate().map(|(i, x)| (i as i64, x.clone()))))
}

/// The free-variable assignment `x1..xn := codes of args, y := code of out`.
pub fn point(args: &[Scalar], out: &RFinite) -> crate::hf::Assignment {
    let mut env: crate::hf::Assignment =
        args.iter().enumerate().map(|(j, a)| (input_var(j + 1), scalar_code(a))).collect();
    env.insert(OUTPUT_VAR.to_string(), tuple_code(out));
    env
}

impl SigmaFunctionDef {
    /// Text form: a header line, then `role` lines each followed by one
    /// formula line.
    pub fn to_text(&self) -> String {
        let mut s = format!("sigma-function {} {} {}\nrole graph\n{}\n", self.name, self.arity, self.outputs, self.graph);
        if let Some(c) = &self.cograph {
            s.push_str(&format!("role cograph\n{c}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, TranslateError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with(';'));
        let header = lines.next().ok_or_else(|| TranslateError::Format("empty input".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let [tag, name, arity, outputs] = h[..] else {
            return Err(TranslateError::Format(format!("bad header `{header}`")));
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| TranslateError::Format(format!("bad number `{s}`")));
        if tag != "sigma-function" {
            return Err(TranslateError::Format(format!("bad header `{header}`")));
        }
        let roles = read_roles(&mut lines)?;
        let mut graph = None;
        let mut cograph = None;
        for (role, f) in roles {
            match role.as_str() {
                "graph" => graph = Some(f),
                "cograph" => cograph = Some(f),
                other => return Err(TranslateError::Format(format!("unknown role `{other}`"))),
            }
        }
        Ok(SigmaFunctionDef {
            name: name.to_string(),
            arity: num(arity)?,
            outputs: num(outputs)?,
            graph: graph.ok_or_else(|| TranslateError::Format("missing graph".into()))?,
            cograph,
        })
    }
}

impl fmt::Display for SigmaFunctionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Reads `role NAME...` / formula line pairs, keeping the full role line
/// after the keyword.
pub(crate) fn read_roles<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<Vec<(String, Formula)>, TranslateError> {
    let mut out = Vec::new();
    while let Some(l) = lines.next() {
        let role = l
            .trim()
            .strip_prefix("role ")
            .ok_or_else(|| TranslateError::Format(format!("expected `role`, got `{}`", l.trim())))?;
        let body = lines.next().ok_or_else(|| TranslateError::Format(format!("role `{role}` has no formula")))?;
        out.push((role.trim().to_string(), body.parse::<Formula>()?));
    }
    Ok(out)
}
