//! Small Δ₀ gadgets over codes built from tagged pairs `{{i}, {{x}}}`.

use crate::hf::formula::{and, base, bexists, bforall, equal, member, not, or, BasePred, Formula, Term};

/// Generates bound variable names that never repeat inside one formula.
#[derive(Default)]
pub struct Namer {
    n: usize,
    prefix: String,
}

impl Namer {
    pub fn with_prefix(prefix: &str) -> Self {
        Namer { n: 0, prefix: prefix.to_string() }
    }

    pub fn fresh(&mut self, stem: &str) -> String {
        self.n += 1;
        format!("{}{stem}{}", self.prefix, self.n)
    }
}

pub fn v(name: &str) -> Term {
    Term::var(name)
}

pub fn int(i: i64) -> Term {
    Term::atom(i)
}

fn sg(t: &Term) -> Term {
    Term::singleton(t.clone())
}

pub fn is_zero(t: &Term) -> Formula {
    base(BasePred::IsZero, vec![sg(t)])
}

pub fn less(a: &Term, b: &Term) -> Formula {
    base(BasePred::Less, vec![sg(a), sg(b)])
}

/// `a + b = c` on atoms.
pub fn add(a: &Term, b: &Term, c: &Term) -> Formula {
    base(BasePred::Add, vec![sg(a), sg(b), sg(c)])
}

/// `a * b = c` on atoms.
pub fn mul(a: &Term, b: &Term, c: &Term) -> Formula {
    base(BasePred::Mul, vec![sg(a), sg(b), sg(c)])
}

pub fn eq(a: &Term, b: &Term) -> Formula {
    equal(a.clone(), b.clone())
}

pub fn one_of(i: &Term, values: impl IntoIterator<Item = i64>) -> Formula {
    or(values.into_iter().map(|k| eq(i, &int(k))).collect())
}

pub type Body<'a> = &'a mut dyn FnMut(&mut Namer, Term) -> Formula;
pub type PairBody<'a> = &'a mut dyn FnMut(&mut Namer, Term, Term, Term) -> Formula;

/// Splits a pair `p = {{i}, {{x}}}` into its index and value.
pub fn dec(nm: &mut Namer, p: &Term, body: &mut dyn FnMut(&mut Namer, Term, Term) -> Formula) -> Formula {
    let (q, i, r, s, x) = (nm.fresh("q"), nm.fresh("i"), nm.fresh("r"), nm.fresh("s"), nm.fresh("x"));
    let (it, xt) = (v(&i), v(&x));
    let inner = and(vec![eq(p, &Term::pair(it.clone(), xt.clone())), body(nm, it, xt)]);
    bexists(&q, p.clone(), bexists(&i, v(&q), bexists(&r, p.clone(), bexists(&s, v(&r), bexists(&x, v(&s), inner)))))
}

/// Some element of `set` is a pair satisfying `body(p, i, x)`.
pub fn some_pair(nm: &mut Namer, set: &Term, body: PairBody) -> Formula {
    let p = nm.fresh("p");
    let pt = v(&p);
    let inner = dec(nm, &pt, &mut |nm, i, x| body(nm, pt.clone(), i, x));
    bexists(&p, set.clone(), inner)
}

/// Every element of `set` is a pair satisfying `body(p, i, x)`.
pub fn all_pairs(nm: &mut Namer, set: &Term, body: PairBody) -> Formula {
    let p = nm.fresh("p");
    let pt = v(&p);
    let inner = dec(nm, &pt, &mut |nm, i, x| body(nm, pt.clone(), i, x));
    bforall(&p, set.clone(), inner)
}

/// The value stored under the fixed index `j` in `set`, with no default.
pub fn lookup(nm: &mut Namer, set: &Term, j: &Term, body: Body) -> Formula {
    let (p, q, r, x) = (nm.fresh("p"), nm.fresh("q"), nm.fresh("r"), nm.fresh("x"));
    let xt = v(&x);
    let inner = and(vec![eq(&v(&p), &Term::pair(j.clone(), xt.clone())), body(nm, xt)]);
    bexists(&p, set.clone(), bexists(&q, v(&p), bexists(&r, v(&q), bexists(&x, v(&r), inner))))
}

/// The value at index `j` of a sparse code, reading 0 when absent.
pub fn val_at(nm: &mut Namer, set: &Term, j: &Term, body: Body) -> Formula {
    let present = lookup(nm, set, j, body);
    let (p, q) = (nm.fresh("p"), nm.fresh("q"));
    let absent = not(bexists(&p, set.clone(), bexists(&q, v(&p), eq(&v(&q), &Term::singleton(j.clone())))));
    or(vec![present, and(vec![absent, body(nm, int(0))])])
}

/// Distinct elements carry distinct indices.
pub fn unique_indices(nm: &mut Namer, set: &Term) -> Formula {
    let s = set.clone();
    all_pairs(nm, set, &mut |nm, p, i, _| {
        all_pairs(nm, &s, &mut |_, p2, i2, _| or(vec![not(eq(&i, &i2)), eq(&p, &p2)]))
    })
}

/// A sparse code: pairs with distinct indices and nonzero values.
pub fn sparse(nm: &mut Namer, set: &Term) -> Formula {
    let nonzero = all_pairs(nm, set, &mut |_, _, _, x| not(is_zero(&x)));
    and(vec![nonzero, unique_indices(nm, set)])
}

/// A sparse code whose indices lie in `range`.
pub fn sparse_within(nm: &mut Namer, set: &Term, range: std::ops::Range<i64>) -> Formula {
    let within = all_pairs(nm, set, &mut |_, _, i, _| one_of(&i, range.clone()));
    and(vec![sparse(nm, set), within])
}

/// Membership of the pair `(j, x)` in `set`.
pub fn has_pair(j: &Term, x: &Term, set: &Term) -> Formula {
    member(Term::pair(j.clone(), x.clone()), set.clone())
}

/// The scalar code `s` holds the value `x`.
pub fn scalar_is(nm: &mut Namer, s: &Term, x: &Term) -> Formula {
    let x = x.clone();
    and(vec![sparse_within(nm, s, 0..1), val_at(nm, s, &int(0), &mut |_, a| eq(&a, &x))])
}

/// Hands `body` the scalar code of the atom `x` as a term.
pub fn with_code(x: &Term, body: &mut dyn FnMut(Term) -> Formula) -> Formula {
    or(vec![
        and(vec![is_zero(x), body(Term::set(vec![]))]),
        and(vec![not(is_zero(x)), body(Term::singleton(Term::pair(int(0), x.clone())))]),
    ])
}
