//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rbss::hf::{FiniteTree, HfSet};
use rbss::machine::RInfinity;
use rbss::Scalar;

/// All rooted unordered trees with `n` nodes as sorted parenthesis strings.
pub fn ahu_trees(n: usize) -> BTreeSet<String> {
    let mut memo_t: Vec<BTreeSet<String>> = vec![BTreeSet::new(); n + 1];
    let mut memo_f: Vec<BTreeSet<Vec<String>>> = vec![BTreeSet::new(); n + 1];
    memo_f[0].insert(Vec::new());
    for size in 1..=n {
        let trees: BTreeSet<String> = memo_f[size - 1]
            .iter()
            .map(|f| format!("({})", f.concat()))
            .collect();
        memo_t[size] = trees;
        let mut forests = BTreeSet::new();
        for first in 1..=size {
            for t in &memo_t[first] {
                for rest in &memo_f[size - first] {
                    let mut f = rest.clone();
                    f.push(t.clone());
                    f.sort();
                    forests.insert(f);
                }
            }
        }
        memo_f[size] = forests;
    }
    memo_t[n].clone()
}

pub fn ahu_of(t: &FiniteTree) -> String {
    let mut kids: Vec<String> = t.children().iter().map(ahu_of).collect();
    kids.sort();
    format!("({})", kids.concat())
}

pub fn ahu_leaves(s: &str) -> usize {
    s.matches("()").count()
}

/// A random rational with small numerator and denominator.
pub fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Scalar {
    Scalar::new(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

pub fn sparse_vector(rng: &mut ChaCha8Rng, span: i64, max_len: usize) -> RInfinity {
    let len = rng.gen_range(0..=max_len);
    RInfinity::from_pairs((0..len).map(|_| {
        let mut x = small_rational(rng, 9, 5);
        if x.is_zero() {
            x = Scalar::one();
        }
        (rng.gen_range(-span..=span), x)
    }))
}

/// A random nested set over a few atoms, deliberately non-canonical.
pub fn raw_set(rng: &mut ChaCha8Rng, depth: usize) -> HfSet {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) { HfSet::atom(rng.gen_range(-2..=2)) } else { HfSet::Set(Vec::new()) };
    }
    let n = rng.gen_range(0..4);
    HfSet::Set((0..n).map(|_| raw_set(rng, depth - 1)).collect())
}

/// Shuffles and duplicates elements at every level without changing the set.
pub fn scramble(rng: &mut ChaCha8Rng, x: &HfSet) -> HfSet {
    match x {
        HfSet::Atom(_) => x.clone(),
        HfSet::Set(es) => {
            let mut v: Vec<HfSet> = es.iter().map(|e| scramble(rng, e)).collect();
            if !v.is_empty() && rng.gen_bool(0.5) {
                let i = rng.gen_range(0..v.len());
                v.push(scramble(rng, &es[i]));
            }
            for i in (1..v.len()).rev() {
                let j = rng.gen_range(0..=i);
                v.swap(i, j);
            }
            HfSet::Set(v)
        }
    }
}

/// ln x to `digits` decimal places via ln x = 2 atanh((x-1)/(x+1)),
/// as an exact rational within 10^-digits.
pub fn ln_reference(x: &BigRational, digits: u32) -> BigRational {
    assert!(x.is_positive());
    let one = BigRational::one();
    let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(digits + 5));
    // Reduce into [1/2, 2] with powers of 2 so the series converges quickly.
    let two = BigRational::from_integer(BigInt::from(2));
    let mut y = x.clone();
    let mut k: i64 = 0;
    while y > two {
        y /= &two;
        k += 1;
    }
    while y < &one / &two {
        y *= &two;
        k -= 1;
    }
    let ln2 = atanh_series(&BigRational::new(BigInt::one(), BigInt::from(3)), &tol) * BigRational::from_integer(2.into());
    let z = (&y - &one) / (&y + &one);
    let base = atanh_series(&z, &tol) * BigRational::from_integer(2.into());
    let total = base + ln2 * BigRational::from_integer(k.into());
    round_to(&total, digits + 3)
}

fn atanh_series(z: &BigRational, tol: &BigRational) -> BigRational {
    let z2 = z * z;
    let mut term = z.clone();
    let mut sum = BigRational::zero();
    let mut n: u64 = 0;
    loop {
        let t = &term / BigRational::from_integer(BigInt::from(2 * n + 1));
        if t.abs() < *tol {
            break;
        }
        sum += t;
        term *= &z2;
        n += 1;
    }
    sum
}

fn round_to(x: &BigRational, digits: u32) -> BigRational {
    let scale = BigInt::from(10).pow(digits);
    let scaled = (x * BigRational::from_integer(scale.clone())).round();
    scaled / BigRational::from_integer(scale)
}

/// e^x for rational x by Taylor series, within about 10^-digits.
pub fn exp_reference(x: &BigRational, digits: u32) -> BigRational {
    let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(digits + 5));
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    let mut n: u64 = 0;
    loop {
        if term.abs() < tol && BigRational::from_integer(BigInt::from(n)) > x.abs() {
            break;
        }
        sum += &term;
        n += 1;
        term = term * x / BigRational::from_integer(BigInt::from(n));
    }
    round_to(&sum, digits + 3)
}

pub fn rat(s: &str) -> BigRational {
    s.parse::<Scalar>().unwrap().as_rational().clone()
}

pub fn fixture_path(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

pub fn machine(name: &str) -> rbss::machine::Machine {
    let text = std::fs::read_to_string(fixture_path(&format!("machines/{name}.bssm"))).unwrap();
    rbss::machine::parse_machine(&text).unwrap()
}

pub fn s(x: i64) -> Scalar {
    Scalar::from_int(x)
}
