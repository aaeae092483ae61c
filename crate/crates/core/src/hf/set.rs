//! Hereditarily finite sets over rational atoms, kept in canonical form.

use std::fmt;
use std::str::FromStr;

use crate::scalar::Scalar;

use super::HfError;

/// A hereditarily finite set or an atom.
///
/// Values built through [`HfSet::set`] or [`canonicalize`] keep every
/// element list sorted under the derived order and free of duplicates, so
/// `==` is extensional equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HfSet {
    Atom(Scalar),
    Set(Vec<HfSet>),
}

impl HfSet {
    pub fn empty() -> Self {
        HfSet::Set(Vec::new())
    }

    pub fn atom(x: impl Into<Scalar>) -> Self {
        HfSet::Atom(x.into())
    }

    /// Builds a canonical set from arbitrary (already canonical) elements.
    pub fn set(elements: impl IntoIterator<Item = HfSet>) -> Self {
        let mut v: Vec<HfSet> = elements.into_iter().collect();
        v.sort();
        v.dedup();
        HfSet::Set(v)
    }

    pub fn singleton(x: HfSet) -> Self {
        HfSet::Set(vec![x])
    }

    /// `{{i}, {{x}}}` with `i` and `x` as atoms.
    pub fn pair_tag(i: i64, x: &Scalar) -> Self {
        HfSet::set([
            HfSet::singleton(HfSet::atom(i)),
            HfSet::singleton(HfSet::singleton(HfSet::Atom(x.clone()))),
        ])
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, HfSet::Atom(_))
    }

    pub fn as_atom(&self) -> Option<&Scalar> {
        match self {
            HfSet::Atom(a) => Some(a),
            HfSet::Set(_) => None,
        }
    }

    pub fn elements(&self) -> Option<&[HfSet]> {
        match self {
            HfSet::Atom(_) => None,
            HfSet::Set(es) => Some(es),
        }
    }

    /// Elements when a set; atoms have none.
    pub fn members(&self) -> &[HfSet] {
        self.elements().unwrap_or(&[])
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(self, HfSet::Set(es) if es.is_empty())
    }

    /// The atom `a` when `self = {a}`.
    pub fn singleton_atom(&self) -> Option<&Scalar> {
        match self {
            HfSet::Set(es) if es.len() == 1 => es[0].as_atom(),
            _ => None,
        }
    }

    /// Atoms have rank 0; a set has rank one more than its highest-ranked
    /// element, and the empty set has rank 0.
    pub fn rank(&self) -> usize {
        match self {
            HfSet::Atom(_) => 0,
            HfSet::Set(es) => es.iter().map(|e| e.rank() + 1).max().unwrap_or(0),
        }
    }

    /// Number of nodes in the membership tree.
    pub fn size(&self) -> usize {
        match self {
            HfSet::Atom(_) => 1,
            HfSet::Set(es) => 1 + es.iter().map(HfSet::size).sum::<usize>(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            HfSet::Atom(_) => true,
            HfSet::Set(es) => es.windows(2).all(|w| w[0] < w[1]) && es.iter().all(HfSet::is_canonical),
        }
    }

    /// Membership by binary search; requires canonical `self`.
    pub fn contains(&self, x: &HfSet) -> bool {
        match self {
            HfSet::Atom(_) => false,
            HfSet::Set(es) => es.binary_search(x).is_ok(),
        }
    }

    /// Every atom occurring anywhere inside.
    pub fn atoms(&self, out: &mut Vec<Scalar>) {
        match self {
            HfSet::Atom(a) => out.push(a.clone()),
            HfSet::Set(es) => es.iter().for_each(|e| e.atoms(out)),
        }
    }
}

/// Sorts and deduplicates at every level. Idempotent.
pub fn canonicalize(x: &HfSet) -> HfSet {
    match x {
        HfSet::Atom(a) => HfSet::Atom(a.clone()),
        HfSet::Set(es) => HfSet::set(es.iter().map(canonicalize)),
    }
}

pub fn hf_equal(a: &HfSet, b: &HfSet) -> bool {
    a == b
}

/// `a ∈ b`. Atoms have no members, so asking for one is an error.
pub fn hf_member(a: &HfSet, b: &HfSet) -> Result<bool, HfError> {
    match b {
        HfSet::Atom(x) => Err(HfError::AtomMembership(x.to_pq())),
        HfSet::Set(_) => Ok(b.contains(a)),
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HfSet::Atom(a) => write!(f, "atom({})", a.to_pq()),
            HfSet::Set(es) => {
                f.write_str("{")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for HfSet {
    type Err = HfError;

    /// Parses `atom(p/q)` and `{e1, e2, ...}`; the result is canonicalized.
    fn from_str(s: &str) -> Result<Self, HfError> {
        let mut p = SetParser { src: s, pos: 0 };
        let v = p.value()?;
        p.ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(canonicalize(&v))
    }
}

struct SetParser<'a> {
    src: &'a str,
    pos: usize,
}

impl SetParser<'_> {
    fn ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn error(&self, what: &str) -> HfError {
        HfError::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn value(&mut self) -> Result<HfSet, HfError> {
        if self.eat("{") {
            let mut es = Vec::new();
            if self.eat("}") {
                return Ok(HfSet::Set(es));
            }
            loop {
                es.push(self.value()?);
                if self.eat("}") {
                    return Ok(HfSet::Set(es));
                }
                if !self.eat(",") {
                    return Err(self.error("expected `,` or `}`"));
                }
            }
        }
        if self.eat("atom(") {
            let rest = &self.src[self.pos..];
            let end = rest.find(')').ok_or_else(|| self.error("unclosed `atom(`"))?;
            let lit = rest[..end].trim();
            let x = Scalar::from_str(lit).map_err(|_| self.error(&format!("bad atom `{lit}`")))?;
            self.pos += end + 1;
            return Ok(HfSet::Atom(x));
        }
        Err(self.error("expected `{` or `atom(`"))
    }
}
