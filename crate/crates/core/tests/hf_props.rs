mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rbss::hf::*;
use rbss::machine::RInfinity;
use rbss::Scalar;

use common::*;

#[test]
fn tree_enumeration_matches_exhaustive_generator() {
    for k in 1..=8 {
        let mut ours = Vec::new();
        let mut n = 0u128;
        loop {
            let t = tree_unrank(k, n).unwrap();
            if t.nodes() > 9 {
                break;
            }
            ours.push(t);
            n += 1;
        }
        assert!(ours.windows(2).all(|w| w[0].nodes() <= w[1].nodes()), "node count order for k={k}");
        let strings: Vec<String> = ours.iter().map(ahu_of).collect();
        let distinct: BTreeSet<String> = strings.iter().cloned().collect();
        assert_eq!(distinct.len(), strings.len(), "repetition for k={k}");
        let expected: BTreeSet<String> =
            (1..=9).flat_map(ahu_trees).filter(|s| ahu_leaves(s) == k).collect();
        assert_eq!(distinct, expected, "k={k}");
    }
}

#[test]
fn two_leaf_trees_are_pairwise_distinct() {
    let seen: BTreeSet<String> = (0..1000u128).map(|n| ahu_of(&tree_unrank(2, n).unwrap())).collect();
    assert_eq!(seen.len(), 1000);
}

#[test]
fn zigzag_is_bijective_on_window() {
    let mut seen = std::collections::HashSet::new();
    for i in -1_000_000i64..=1_000_000 {
        let z = zigzag(i);
        assert!(seen.insert(z));
        assert_eq!(unzigzag(z), Some(i));
    }
    assert!((0..2_000_001u128).all(|z| seen.contains(&z)));
}

#[test]
fn encode_examples_read_backwards() {
    let v = RInfinity::from_pairs([(0, Scalar::from_int(5))]);
    let e: HfSet = "{{atom(0/1)}, {{atom(5/1)}}}".parse().unwrap();
    assert_eq!(decode(&e), Some(v.clone()));
    let w = RInfinity::from_pairs([(0, Scalar::from_int(5)), (1, Scalar::from_int(5))]);
    assert!(!hf_equal(&encode(&v).unwrap(), &encode(&w).unwrap()));
    assert_eq!(decode(&HfSet::singleton(HfSet::singleton(HfSet::empty()))), None);
}

#[test]
fn delta0_invariant_under_scrambled_environment() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let formulas: Vec<Formula> = [
        "(exists-in a x (in a y))",
        "(forall-in a x (exists-in b y (= a b)))",
        "(or (in {} x) (= x y))",
        "(exists-in a x (exists-in b a (in b y)))",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect();
    for _ in 0..200 {
        let x = raw_set(&mut rng, 3);
        let y = raw_set(&mut rng, 3);
        let base: Assignment = [("x".to_string(), canonicalize(&x)), ("y".to_string(), canonicalize(&y))].into();
        let variant: Assignment =
            [("x".to_string(), canonicalize(&scramble(&mut rng, &x))), ("y".to_string(), canonicalize(&scramble(&mut rng, &y)))]
                .into();
        for f in &formulas {
            assert_eq!(eval_delta0(f, &base).ok(), eval_delta0(f, &variant).ok(), "{f}");
        }
    }
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_order_blind(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = raw_set(&mut rng, 4);
        let c = canonicalize(&x);
        prop_assert!(c.is_canonical());
        prop_assert_eq!(canonicalize(&c), c.clone());
        prop_assert_eq!(canonicalize(&scramble(&mut rng, &x)), c.clone());
        let text = c.to_string();
        prop_assert_eq!(text.parse::<HfSet>().unwrap(), c);
    }

    #[test]
    fn codes_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = sparse_vector(&mut rng, 20, 6);
        prop_assert_eq!(decode_seq(&encode_seq(&v)), Some(v.clone()));
        prop_assert_eq!(decode(&encode(&v).unwrap()), Some(v));
    }

    #[test]
    fn formula_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lit = Term::Lit(canonicalize(&raw_set(&mut rng, 2)));
        let f = formula::bexists("a", Term::var("x"), formula::or(vec![
            formula::member(Term::var("a"), lit.clone()),
            formula::base(BasePred::Add, vec![Term::singleton(Term::var("a")), lit.clone(), Term::atom(Scalar::new(3, 4))]),
            formula::exists("b", formula::equal(Term::set(vec![Term::var("b"), lit]), Term::var("a"))),
        ]));
        let text = f.to_string();
        let back: Formula = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, f);
    }
}
