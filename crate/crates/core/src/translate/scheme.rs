//! Σ-presentations of structures whose universe and relations are decided
//! by machines, and the structure `M′` of witnessed universe elements.

use std::collections::BTreeMap;
use std::fmt;

use crate::hf::formula::{and, not, Formula, Term};
use crate::hf::{decode, encode, eval_delta0, eval_sigma, Assignment, HfError, HfSet, SearchBudget, SigmaOutcome};
use crate::machine::{Machine, RInfinity};
use crate::Scalar;

use super::combinators::rename;
use super::{graph_formula, input_var, read_roles, scalar_code, TranslateError, OUTPUT_VAR};

/// Key of the machine deciding the universe.
pub const UNIVERSE: &str = "universe";

#[derive(Clone, Debug)]
pub struct StructureMachine {
    pub machine: Machine,
    /// The machine halts on every input; required for the starred formulas.
    pub total: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub arity: usize,
    pub formula: Formula,
    /// Holds exactly on the complement.
    pub star: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaScheme {
    /// Universe membership of `x1`.
    pub psi0: Formula,
    pub psi0_star: Formula,
    /// Equality of `x1` and `x2`.
    pub psi1: Formula,
    pub psi1_star: Formula,
    pub phi: Vec<PredicateDef>,
}

impl SigmaScheme {
    pub fn signature(&self) -> Vec<(&str, usize)> {
        self.phi.iter().map(|p| (p.name.as_str(), p.arity)).collect()
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDef> {
        self.phi.iter().find(|p| p.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("sigma-scheme\n");
        let mut role = |r: String, f: &Formula| s.push_str(&format!("role {r}\n{f}\n"));
        role("psi0 1".into(), &self.psi0);
        role("psi0* 1".into(), &self.psi0_star);
        role("psi1 2".into(), &self.psi1);
        role("psi1* 2".into(), &self.psi1_star);
        for p in &self.phi {
            role(format!("phi {} {}", p.name, p.arity), &p.formula);
            role(format!("phi* {} {}", p.name, p.arity), &p.star);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, TranslateError> {
        let bad = |m: String| TranslateError::Format(m);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with(';'));
        if lines.next().map(str::trim) != Some("sigma-scheme") {
            return Err(bad("expected `sigma-scheme` header".into()));
        }
        let mut fixed: BTreeMap<String, Formula> = BTreeMap::new();
        let mut phi: Vec<PredicateDef> = Vec::new();
        for (role, f) in read_roles(&mut lines)? {
            let words: Vec<&str> = role.split_whitespace().collect();
            match words[..] {
                [r @ ("psi0" | "psi0*" | "psi1" | "psi1*"), _] => {
                    fixed.insert(r.to_string(), f);
                }
                ["phi", name, n] => phi.push(PredicateDef {
                    name: name.to_string(),
                    arity: n.parse().map_err(|_| bad(format!("bad arity in `{role}`")))?,
                    formula: f.clone(),
                    star: f,
                }),
                ["phi*", name, _] => {
                    let p = phi
                        .iter_mut()
                        .find(|p| p.name == name)
                        .ok_or_else(|| bad(format!("`phi* {name}` before `phi {name}`")))?;
                    p.star = f;
                }
                _ => return Err(bad(format!("unknown role `{role}`"))),
            }
        }
        let mut take = |r: &str| fixed.remove(r).ok_or_else(|| bad(format!("missing role `{r}`")));
        Ok(SigmaScheme {
            psi0: take("psi0")?,
            psi0_star: take("psi0*")?,
            psi1: take("psi1")?,
            psi1_star: take("psi1*")?,
            phi,
        })
    }
}

impl fmt::Display for SigmaScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The graph of a characteristic machine at output `value`.
fn at_value(m: &Machine, value: i64) -> Formula {
    let g = graph_formula(m, false).graph;
    rename(&g, &[(OUTPUT_VAR.to_string(), Term::Lit(scalar_code(&Scalar::from_int(value))))])
}

/// Each machine outputs 1 on members and 0 elsewhere; the one under
/// [`UNIVERSE`] is unary and decides the universe.
pub fn structure_presentation(machines: &BTreeMap<String, StructureMachine>) -> Result<SigmaScheme, TranslateError> {
    let universe = machines.get(UNIVERSE).ok_or_else(|| TranslateError::MissingPredicate(UNIVERSE.into()))?;
    for (name, sm) in machines {
        if !sm.total {
            return Err(TranslateError::NotTotal(name.clone()));
        }
    }
    if universe.machine.arity() != 1 {
        return Err(TranslateError::Arity(format!("universe machine takes {} inputs", universe.machine.arity())));
    }
    let (x1, x2) = (Term::var(&input_var(1)), Term::var(&input_var(2)));
    let phi = machines
        .iter()
        .filter(|(name, _)| name.as_str() != UNIVERSE)
        .map(|(name, sm)| PredicateDef {
            name: name.clone(),
            arity: sm.machine.arity(),
            formula: at_value(&sm.machine, 1),
            star: at_value(&sm.machine, 0),
        })
        .collect();
    Ok(SigmaScheme {
        psi0: at_value(&universe.machine, 1),
        psi0_star: at_value(&universe.machine, 0),
        psi1: crate::hf::formula::equal(x1.clone(), x2.clone()),
        psi1_star: not(crate::hf::formula::equal(x1, x2)),
        phi,
    })
}

#[derive(Clone, Debug)]
pub struct Semidecision {
    pub outcome: SigmaOutcome,
    /// Arguments that are tree codes, read back as vectors; each one was
    /// re-encoded and compared with the argument before the search.
    pub unfolded: Vec<Option<RInfinity>>,
}

/// Semi-decides `u(x1..xn)` on the structure: every argument must satisfy
/// `psi0` and `u` must hold, both by witness search under `budget`.
pub fn sigma_semidecide(
    scheme: &SigmaScheme,
    u: &Formula,
    args: &[HfSet],
    budget: &SearchBudget,
) -> Result<Semidecision, TranslateError> {
    let mut unfolded = Vec::with_capacity(args.len());
    for a in args {
        let l = decode(a);
        if let Some(v) = &l {
            if encode(v).ok().as_ref() != Some(a) {
                return Ok(Semidecision { outcome: SigmaOutcome::Unknown, unfolded });
            }
        }
        unfolded.push(l);
    }
    let mut parts: Vec<Formula> = (1..=args.len())
        .map(|i| rename(&scheme.psi0, &[(input_var(1), Term::var(&input_var(i)))]))
        .collect();
    parts.push(u.clone());
    let env: Assignment = args.iter().enumerate().map(|(i, a)| (input_var(i + 1), a.clone())).collect();
    let outcome = eval_sigma(&and(parts), &env, budget)?;
    Ok(Semidecision { outcome, unfolded })
}

/// A universe element with the real vector witnessing its membership.
/// Equality looks at the carrier only.
#[derive(Clone, Debug)]
pub struct MPrimeElement {
    pub carrier: HfSet,
    pub witness: RInfinity,
}

impl PartialEq for MPrimeElement {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier
    }
}

impl Eq for MPrimeElement {}

#[derive(Clone, Debug)]
pub struct MPrime {
    pub signature: Vec<(String, usize)>,
    pub elements: Vec<MPrimeElement>,
}

/// Variable holding the tree code of the witness in a universe matrix.
pub const WITNESS_VAR: &str = "w";

impl MPrime {
    /// Evaluates a Δ₀ relation on carriers; no witness search happens here.
    pub fn holds(&self, matrix: &Formula, args: &[&MPrimeElement]) -> Result<bool, TranslateError> {
        let env: Assignment =
            args.iter().enumerate().map(|(i, e)| (input_var(i + 1), e.carrier.clone())).collect();
        Ok(eval_delta0(matrix, &env)?)
    }
}

/// Collects pairs `(x, t)` with `matrix(x1 := x, w := e(t))` true, where
/// `x` runs over the budget's candidates and `t` over vectors with values
/// from the pool on coordinates `0..=max_rank`. Carriers repeat when
/// several witnesses work; only the first is kept.
pub fn build_m_prime(
    scheme: &SigmaScheme,
    matrix: &Formula,
    budget: &SearchBudget,
    limit: usize,
) -> Result<MPrime, TranslateError> {
    if !matrix.is_delta0() {
        return Err(HfError::WrongClass("Δ₀").into());
    }
    let values: Vec<Scalar> = budget.atom_pool.iter().filter(|a| !a.is_zero()).cloned().collect();
    let coords = budget.max_rank as i64 + 1;
    let mut witnesses = vec![RInfinity::new()];
    for i in 0..coords {
        let mut next = witnesses.clone();
        for w in &witnesses {
            for x in &values {
                let mut w2 = w.clone();
                w2.set(i, x.clone());
                next.push(w2);
            }
        }
        witnesses = next;
    }
    let codes: Vec<(RInfinity, HfSet)> =
        witnesses.into_iter().filter_map(|w| encode(&w).ok().map(|e| (w, e))).collect();
    let mut elements: Vec<MPrimeElement> = Vec::new();
    for x in budget.candidates() {
        if elements.len() >= limit {
            break;
        }
        let mut env: Assignment = [(input_var(1), x.clone())].into();
        for (w, e) in &codes {
            env.insert(WITNESS_VAR.into(), e.clone());
            if eval_delta0(matrix, &env).unwrap_or(false) {
                elements.push(MPrimeElement { carrier: x.clone(), witness: w.clone() });
                break;
            }
        }
    }
    let signature = scheme.signature().into_iter().map(|(n, a)| (n.to_string(), a)).collect();
    Ok(MPrime { signature, elements })
}
