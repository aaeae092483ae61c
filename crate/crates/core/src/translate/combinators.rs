//! Closure of Σ-definable functions under composition, juxtaposition,
//! minimisation and primitive recursion.

use crate::hf::formula::{and, bexists, bforall, exists, falsity, member, not, or, Formula, Term};

use super::build::*;
use super::{input_var, SigmaFunctionDef, TranslateError, OUTPUT_VAR};

/// Simultaneous capture-avoiding substitution.
pub fn rename(f: &Formula, pairs: &[(String, Term)]) -> Formula {
    let mut taken = f.all_vars();
    let mut temps = Vec::new();
    let mut g = f.clone();
    for (from, _) in pairs {
        let t = crate::hf::formula::fresh_name("_tmp", &taken);
        taken.insert(t.clone());
        g = g.subst(from, &v(&t));
        temps.push(t);
    }
    for (t, (_, to)) in temps.iter().zip(pairs) {
        g = g.subst(t, to);
    }
    g
}

fn fresh(stem: &str, fs: &[&Formula]) -> String {
    let taken = fs.iter().flat_map(|f| f.all_vars()).collect();
    crate::hf::formula::fresh_name(stem, &taken)
}

fn scalar_fn(f: &SigmaFunctionDef) -> Result<(), TranslateError> {
    if f.outputs == 1 {
        Ok(())
    } else {
        Err(TranslateError::NotScalar(f.name.clone()))
    }
}

fn cograph_of(f: &SigmaFunctionDef) -> Result<&Formula, TranslateError> {
    f.cograph.as_ref().ok_or_else(|| TranslateError::MissingCograph(f.name.clone()))
}

fn with_output(f: &Formula, y: &Term) -> Formula {
    rename(f, &[(OUTPUT_VAR.to_string(), y.clone())])
}

/// `f ∘ g` for unary `f` and single-output `g`.
pub fn compose(f: &SigmaFunctionDef, g: &SigmaFunctionDef) -> Result<SigmaFunctionDef, TranslateError> {
    scalar_fn(g)?;
    if f.arity != 1 {
        return Err(TranslateError::Arity(format!("{} takes {} inputs, composition feeds it one", f.name, f.arity)));
    }
    let z = fresh("z", &[&f.graph, &g.graph]);
    let zt = v(&z);
    let build = |outer: &Formula| {
        exists(&z, and(vec![with_output(&g.graph, &zt), rename(outer, &[(input_var(1), zt.clone())])]))
    };
    Ok(SigmaFunctionDef {
        name: format!("{}.{}", f.name, g.name),
        arity: g.arity,
        outputs: f.outputs,
        graph: build(&f.graph),
        cograph: f.cograph.as_ref().map(build),
    })
}

/// `y` splits into `y1` (first `m1` places) followed by `y2`.
fn concat(nm: &mut Namer, y1: &Term, y2: &Term, y: &Term, m1: i64, m2: i64) -> Formula {
    let m = int(m1);
    let (yy, yb) = (y.clone(), y2.clone());
    let first = all_pairs(nm, y1, &mut |_, _, i, x| has_pair(&i, &x, &yy));
    let (yy, mm) = (y.clone(), m.clone());
    let second = all_pairs(nm, y2, &mut |nm, _, i, x| {
        let (i, x, mm) = (i.clone(), x.clone(), mm.clone());
        some_pair(nm, &yy, &mut |_, _, i2, x2| and(vec![add(&i, &mm, &i2), eq(&x, &x2)]))
    });
    let (ya, mm) = (y1.clone(), m.clone());
    let back = all_pairs(nm, y, &mut |nm, _, i, x| {
        let (i2, x2, mm2) = (i.clone(), x.clone(), mm.clone());
        or(vec![
            and(vec![less(&i, &mm), has_pair(&i, &x, &ya)]),
            and(vec![
                not(less(&i, &mm)),
                some_pair(nm, &yb, &mut |_, _, j, w| and(vec![add(&j, &mm2, &i2), eq(&w, &x2)])),
            ]),
        ])
    });
    and(vec![
        sparse_within(nm, y1, 0..m1),
        sparse_within(nm, y2, 0..m2),
        sparse_within(nm, y, 0..m1 + m2),
        first,
        second,
        back,
    ])
}

/// `x̄ ↦ (f(x̄), g(x̄))`.
pub fn juxtapose(f: &SigmaFunctionDef, g: &SigmaFunctionDef) -> Result<SigmaFunctionDef, TranslateError> {
    if f.arity != g.arity {
        return Err(TranslateError::Arity(format!("{} takes {}, {} takes {}", f.name, f.arity, g.name, g.arity)));
    }
    let y1 = fresh("ya", &[&f.graph, &g.graph]);
    let y2 = fresh("yb", &[&f.graph, &g.graph]);
    let (t1, t2) = (v(&y1), v(&y2));
    let split = concat(&mut Namer::with_prefix("_j"), &t1, &t2, &v(OUTPUT_VAR), f.outputs as i64, g.outputs as i64);
    let graph = exists(
        &y1,
        exists(&y2, and(vec![with_output(&f.graph, &t1), with_output(&g.graph, &t2), split.clone()])),
    );
    let cograph = match (&f.cograph, &g.cograph) {
        (Some(cf), Some(cg)) => Some(exists(
            &y1,
            exists(&y2, and(vec![split, or(vec![with_output(cf, &t1), with_output(cg, &t2)])])),
        )),
        _ => None,
    };
    Ok(SigmaFunctionDef {
        name: format!("{}x{}", f.name, g.name),
        arity: f.arity,
        outputs: f.outputs + g.outputs,
        graph,
        cograph,
    })
}

/// Renames `x_j` to `x_{j+shift}` for `j` in `range`.
fn shift_inputs(range: std::ops::RangeInclusive<usize>, shift: isize) -> Vec<(String, Term)> {
    range.map(|j| (input_var(j), v(&input_var((j as isize + shift) as usize)))).collect()
}

/// `N` is exactly the set of scalar codes of `0..t` where `y` codes `t`.
fn numerals(nm: &mut Namer, n: &Term, y: &Term) -> Formula {
    let (s1, s2, s3) = (nm.fresh("n"), nm.fresh("n"), nm.fresh("n"));
    let codes = bforall(&s1, n.clone(), sparse_within(nm, &v(&s1), 0..1));
    let nn = n.clone();
    let body = val_at(nm, y, &int(0), &mut |nm, t| {
        let (s2, s3, nn) = (s2.clone(), s3.clone(), nn.clone());
        let empty = and(vec![is_zero(&t), bforall(&s2, nn.clone(), falsity())]);
        let tt = t.clone();
        let closed = bforall(
            &s2,
            nn.clone(),
            val_at(nm, &v(&s2), &int(0), &mut |nm, a| {
                let succ = nm.fresh("n");
                let a2 = a.clone();
                let next = bexists(&succ, nn.clone(), val_at(nm, &v(&succ), &int(0), &mut |_, b| add(&a2, &int(1), &b)));
                and(vec![less(&a, &tt), or(vec![next, add(&a, &int(1), &tt)])])
            }),
        );
        let tt = t.clone();
        let top = bexists(&s3, nn.clone(), val_at(nm, &v(&s3), &int(0), &mut |_, a| add(&a, &int(1), &tt)));
        or(vec![empty, and(vec![member(Term::set(vec![]), nn.clone()), closed, top])])
    });
    and(vec![sparse_within(nm, y, 0..1), codes, body])
}

/// Least natural `t` with `φ(t, x2..xn) = 0`, as a function of `x2..xn`
/// renumbered `x1..x(n-1)`.
pub fn mu(phi: &SigmaFunctionDef) -> Result<SigmaFunctionDef, TranslateError> {
    scalar_fn(phi)?;
    if phi.arity == 0 {
        return Err(TranslateError::Arity(format!("{} has no argument to minimise over", phi.name)));
    }
    let co = cograph_of(phi)?;
    let nname = fresh("N", &[&phi.graph, co]);
    let sname = fresh("s", &[&phi.graph, co]);
    let y = v(OUTPUT_VAR);
    let zero = Term::set(vec![]);
    let hit = rename(&phi.graph, &[(input_var(1), y.clone()), (OUTPUT_VAR.to_string(), zero.clone())]);
    let below = bforall(
        &sname,
        v(&nname),
        rename(co, &[(input_var(1), v(&sname)), (OUTPUT_VAR.to_string(), zero)]),
    );
    let theta = exists(&nname, and(vec![numerals(&mut Namer::with_prefix("_m"), &v(&nname), &y), hit, below]));
    let theta = rename(&theta, &shift_inputs(2..=phi.arity, -1));
    let w = fresh("w", &[&theta]);
    let cograph = exists(&w, and(vec![with_output(&theta, &v(&w)), not(eq(&v(&w), &y))]));
    Ok(SigmaFunctionDef {
        name: format!("mu.{}", phi.name),
        arity: phi.arity - 1,
        outputs: 1,
        graph: theta,
        cograph: Some(cograph),
    })
}

/// `f(0, x̄) = g(x̄)`, `f(s+1, x̄) = h(s, f(s, x̄), x̄)` for naturals `s`.
/// The course of values is a set `C = {(s, code f(s, x̄)) : s ≤ x1}`.
pub fn primrec(g: &SigmaFunctionDef, h: &SigmaFunctionDef) -> Result<SigmaFunctionDef, TranslateError> {
    scalar_fn(g)?;
    scalar_fn(h)?;
    cograph_of(g)?;
    cograph_of(h)?;
    if h.arity != g.arity + 2 {
        return Err(TranslateError::Arity(format!(
            "step {} takes {} inputs, expected {}",
            h.name,
            h.arity,
            g.arity + 2
        )));
    }
    let k = g.arity + 1;
    let cname = fresh("C", &[&g.graph, &h.graph]);
    let ct = v(&cname);
    let x1 = v(&input_var(1));
    let mut nm = Namer::with_prefix("_r");

    let cc = ct.clone();
    let xx = x1.clone();
    let domain = and(vec![
        sparse_within(&mut nm, &x1, 0..1),
        unique_indices(&mut nm, &ct),
        all_pairs(&mut nm, &ct, &mut |nm, _, s, _| {
            let s2 = s.clone();
            let pred = some_pair(nm, &cc, &mut |_, _, s0, _| add(&s0, &int(1), &s2));
            let s3 = s.clone();
            let bounded = val_at(nm, &xx, &int(0), &mut |_, t| not(less(&t, &s3)));
            and(vec![or(vec![is_zero(&s), pred]), bounded])
        }),
    ]);
    let cc = ct.clone();
    let reached = val_at(&mut nm, &x1, &int(0), &mut |nm, t| some_pair(nm, &cc, &mut |_, _, s, _| eq(&s, &t)));

    let g_shift = shift_inputs(1..=g.arity, 1);
    let base = all_pairs(&mut nm, &ct, &mut |_, _, s, z| {
        let mut pairs = g_shift.clone();
        pairs.push((OUTPUT_VAR.to_string(), z.clone()));
        or(vec![not(is_zero(&s)), rename(&g.graph, &pairs)])
    });
    let cc = ct.clone();
    let steps = all_pairs(&mut nm, &ct, &mut |nm, _, s, z| {
        let (s1, z1) = (s.clone(), z.clone());
        let prev = some_pair(nm, &cc, &mut |_, _, s0, z0| {
            let call = with_code(&s0, &mut |code| {
                let mut pairs = vec![(input_var(1), code), (input_var(2), z0.clone())];
                pairs.extend((2..=k).map(|j| (input_var(j + 1), v(&input_var(j)))));
                pairs.push((OUTPUT_VAR.to_string(), z1.clone()));
                rename(&h.graph, &pairs)
            });
            and(vec![add(&s0, &int(1), &s1), call])
        });
        or(vec![is_zero(&s), prev])
    });
    let result = |nm: &mut Namer, negate: bool| {
        let cc = ct.clone();
        val_at(nm, &x1, &int(0), &mut |nm, t| {
            some_pair(nm, &cc, &mut |_, _, s, z| {
                let same = eq(&z, &v(OUTPUT_VAR));
                and(vec![eq(&s, &t), if negate { not(same) } else { same }])
            })
        })
    };
    let common = and(vec![domain, reached, base, steps]);
    let graph = exists(&cname, and(vec![common.clone(), result(&mut nm, false)]));
    let cograph = exists(&cname, and(vec![common, result(&mut nm, true)]));
    Ok(SigmaFunctionDef { name: format!("rec.{}.{}", g.name, h.name), arity: k, outputs: 1, graph, cograph: Some(cograph) })
}
