mod common;

use std::collections::BTreeMap;

use rbss::hf::formula::{and, exists, Formula, Term};
use rbss::hf::{HfSet, SearchBudget};
use rbss::machine::{run, Machine};
use rbss::translate::build::*;
use rbss::translate::combinators::rename;
use rbss::translate::graph::seeds;
use rbss::translate::scheme::{Semidecision, UNIVERSE, WITNESS_VAR};
use rbss::translate::*;
use rbss::Scalar;

use common::*;

fn scheme_of(universe: &str, preds: &[&str]) -> SigmaScheme {
    let mut ms = BTreeMap::new();
    ms.insert(UNIVERSE.to_string(), StructureMachine { machine: machine(universe), total: true });
    for p in preds {
        ms.insert(p.to_string(), StructureMachine { machine: machine(p), total: true });
    }
    structure_presentation(&ms).unwrap()
}

fn budget(seeds: Vec<HfSet>, pool: Vec<Scalar>) -> SearchBudget {
    SearchBudget { max_witnesses: seeds.len() + pool.len() + 40, atom_pool: pool, ..SearchBudget::default() }
        .with_seeds(seeds)
}

fn traces(m: &Machine, xs: &[Scalar]) -> Vec<HfSet> {
    xs.iter().flat_map(|x| seeds(m, &[x.clone()], 100)).collect()
}

#[test]
fn presentation_formulas_follow_the_machines() {
    let sch = scheme_of("unit_interval", &["less"]);
    assert_eq!(sch.signature(), vec![("less", 2)]);
    let unit = machine("unit_interval");
    for q in [Scalar::new(1, 2), s(2), s(-1), s(0), s(1)] {
        let inside = run(&unit, &vec![q.clone()], 100).output().unwrap()[0].is_one();
        let env: rbss::hf::Assignment = [(input_var(1), scalar_code(&q))].into();
        let b = budget(traces(&unit, &[q.clone()]), vec![]);
        assert_eq!(rbss::hf::eval_sigma(&sch.psi0, &env, &b).unwrap().is_true(), inside, "{q}");
        assert_eq!(rbss::hf::eval_sigma(&sch.psi0_star, &env, &b).unwrap().is_true(), !inside, "{q}");
    }
    let less = machine("less");
    let p = sch.predicate("less").unwrap();
    for (a, b, want) in [(s(1), s(2), true), (s(2), s(1), false), (s(1), s(1), false)] {
        let env: rbss::hf::Assignment = [(input_var(1), scalar_code(&a)), (input_var(2), scalar_code(&b))].into();
        let bud = budget(seeds(&less, &[a.clone(), b.clone()], 100), vec![]);
        assert_eq!(rbss::hf::eval_sigma(&p.formula, &env, &bud).unwrap().is_true(), want);
        assert_eq!(rbss::hf::eval_sigma(&p.star, &env, &bud).unwrap().is_true(), !want);
    }
    assert_eq!(SigmaScheme::from_text(&sch.to_text()).unwrap(), sch);
}

#[test]
fn presentation_rejects_partial_machines() {
    let mut ms = BTreeMap::new();
    ms.insert(UNIVERSE.to_string(), StructureMachine { machine: machine("one"), total: false });
    assert!(matches!(structure_presentation(&ms), Err(TranslateError::NotTotal(_))));
    let none: BTreeMap<String, StructureMachine> = BTreeMap::new();
    assert!(matches!(structure_presentation(&none), Err(TranslateError::MissingPredicate(_))));
}

/// `∃y (y in the universe and y*y = x1)`.
fn has_square_root(sch: &SigmaScheme) -> Formula {
    let mut nm = Namer::with_prefix("_u");
    let y = Term::var("y");
    let x1 = Term::var("x1");
    let root = val_at(&mut nm, &y, &int(0), &mut |nm, a| val_at(nm, &x1, &int(0), &mut |_, b| mul(&a, &a, &b)));
    let member = rename(&sch.psi0, &[("x1".to_string(), y.clone())]);
    exists("y", and(vec![sparse_within(&mut nm, &y, 0..1), member, root]))
}

#[test]
fn semidecider_finds_square_roots_inside_the_universe() {
    let whole = scheme_of("one", &[]);
    let u = has_square_root(&whole);
    let one = machine("one");
    let seeds = traces(&one, &[s(4), s(2), s(-2)]);
    let Semidecision { outcome, .. } =
        sigma_semidecide(&whole, &u, &[scalar_code(&s(4))], &budget(seeds.clone(), vec![s(2), s(1)])).unwrap();
    assert!(outcome.is_true());
    let neg = sigma_semidecide(&whole, &u, &[scalar_code(&s(-4))], &budget(seeds, vec![s(2), s(1)])).unwrap();
    assert!(!neg.outcome.is_true());
    // 4 lies outside [0, 1]: never true
    let unit = scheme_of("unit_interval", &[]);
    let u = has_square_root(&unit);
    let m = machine("unit_interval");
    let out = sigma_semidecide(&unit, &u, &[scalar_code(&s(4))], &budget(traces(&m, &[s(4), s(2)]), vec![s(2)])).unwrap();
    assert!(!out.outcome.is_true());
}

/// `x1` codes `q` and `w` is the tree code of `(a, b, r)` with
/// `a^2 = q`, `b^2 = r`, `q + r = 1`.
fn unit_matrix() -> Formula {
    let mut nm = Namer::with_prefix("_w");
    let (x1, w) = (Term::var("x1"), Term::var(WITNESS_VAR));
    let body = val_at(&mut nm, &x1, &int(0), &mut |nm, q| {
        let w = w.clone();
        lookup(nm, &w.clone(), &int(0), &mut |nm, a| {
            let (q, w) = (q.clone(), w.clone());
            lookup(nm, &w.clone(), &int(1), &mut |nm, b| {
                let (q, a) = (q.clone(), a.clone());
                lookup(nm, &w, &int(2), &mut |_, r| {
                    and(vec![mul(&a, &a, &q), mul(&b, &b, &r), add(&q, &r, &int(1))])
                })
            })
        })
    });
    and(vec![sparse_within(&mut nm, &x1, 0..1), body])
}

#[test]
fn m_prime_of_the_unit_interval() {
    let sch = scheme_of("unit_interval", &[]);
    let pool = vec![Scalar::new(3, 5), Scalar::new(4, 5), Scalar::new(9, 25), Scalar::new(16, 25), s(2)];
    let bud = SearchBudget { max_witnesses: 400, atom_pool: pool, max_rank: 2, seeds: vec![] };
    let mp = build_m_prime(&sch, &unit_matrix(), &bud, 10).unwrap();
    let qs: Vec<Scalar> = mp.elements.iter().map(|e| rbss::hf::decode_seq(&e.carrier).unwrap().get(0)).collect();
    assert!(qs.contains(&Scalar::new(9, 25)) && qs.contains(&Scalar::new(16, 25)), "{qs:?}");
    let unit = machine("unit_interval");
    for (e, q) in mp.elements.iter().zip(&qs) {
        assert!(run(&unit, &vec![q.clone()], 100).output().unwrap()[0].is_one());
        let t = &e.witness;
        assert_eq!(&t.get(0) * &t.get(0), *q);
    }
    // a Δ₀ relation agrees with the semidecider on M′ elements
    let mut nm = Namer::with_prefix("_l");
    let (x1, x2) = (Term::var("x1"), Term::var("x2"));
    let lt = val_at(&mut nm, &x1, &int(0), &mut |nm, a| val_at(nm, &x2, &int(0), &mut |_, b| less(&a, &b)));
    for a in &mp.elements {
        for b in &mp.elements {
            let direct = mp.holds(&lt, &[a, b]).unwrap();
            let qa = rbss::hf::decode_seq(&a.carrier).unwrap().get(0);
            let qb = rbss::hf::decode_seq(&b.carrier).unwrap().get(0);
            let sd = traces(&unit, &[qa, qb]);
            let via = sigma_semidecide(&sch, &lt, &[a.carrier.clone(), b.carrier.clone()], &budget(sd, vec![])).unwrap();
            assert_eq!(direct, via.outcome.is_true());
        }
    }
    assert!(build_m_prime(&sch, &exists("z", unit_matrix()), &bud, 1).is_err());
}
