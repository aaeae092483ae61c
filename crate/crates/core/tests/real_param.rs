mod common;

use common::{exp_reference, ln_reference};
use num_bigint::BigInt;
use proptest::prelude::*;
use rbss::real_param::{arith_check, eq_check, exp_cert, ln_bounds, ln_cert, xi, ArithOp, CheckVerdict, DigitStream};
use rbss::Scalar;

fn q(p: i64, d: i64) -> Scalar {
    Scalar::new(p, d)
}

fn reference_ln(x: &Scalar) -> Scalar {
    Scalar::from_rational(ln_reference(x.as_rational(), 50))
}

fn reference_exp(x: &Scalar) -> Scalar {
    Scalar::from_rational(exp_reference(x.as_rational(), 50))
}

fn tiny() -> Scalar {
    Scalar::from_parts(BigInt::from(1), BigInt::from(10).pow(45))
}

#[test]
fn riemann_sums_bracket_the_reference() {
    for x in [q(2, 1), q(3, 1), q(10, 1), q(7, 5), q(101, 100)] {
        let reference = reference_ln(&x);
        let mut last = None;
        for n in [1u64, 2, 3, 10, 100] {
            let e = ln_bounds(&x, n).unwrap();
            assert!(&e.lo - &tiny() <= reference && reference <= &e.hi + &tiny(), "x={x} n={n}");
            let expected = (&x - &Scalar::one()).pow(2).checked_div(&(&Scalar::from_int(n as i64) * &x)).unwrap();
            assert_eq!(e.width(), expected);
            if let Some(prev) = last.replace(e.width()) {
                assert!(e.width() < prev);
            }
        }
    }
}

#[test]
fn certified_logs_contain_the_reference() {
    for (x, eps) in [(q(2, 1), q(1, 1_000_000)), (q(1, 2), q(1, 1000)), (q(1000, 1), q(1, 10_000)), (q(3, 7), q(1, 100_000))] {
        let e = ln_cert(&x, &eps).unwrap();
        let r = reference_ln(&x);
        assert!(e.contains(&r), "ln {x}: {e}");
        assert!(e.width() <= eps);
    }
    assert_eq!(ln_cert(&q(1, 2), &q(1, 1000)).unwrap(), ln_cert(&q(2, 1), &q(1, 1000)).unwrap().neg());
    assert!(ln_cert(&q(-1, 2), &q(1, 10)).is_err());
}

#[test]
fn certified_exponentials_contain_the_reference() {
    for (x, eps) in [(q(1, 1), q(1, 1_000_000)), (q(-1, 1), q(1, 10_000)), (q(5, 2), q(1, 1000)), (q(-7, 3), q(1, 10_000))] {
        let e = exp_cert(&x, &eps).unwrap();
        let r = reference_exp(&x);
        assert!(e.contains(&r), "exp {x}: {e}");
        assert!(e.width() <= eps);
    }
}

#[test]
fn exp_of_ln_returns_to_the_start() {
    let eps = q(1, 10_000);
    for i in 1..=20 {
        let x = q(i * 3, 7);
        let l = ln_cert(&x, &eps).unwrap();
        let e = exp_cert(&l.mid(), &eps).unwrap();
        // |e^mid - x| <= x (e^{w/2} - 1) + width(e), and e^{w/2} - 1 <= w for w <= 1
        let slack = &(&x * &l.width()) + &e.width();
        assert!((&e.mid() - &x).abs() <= slack, "x={x} ln={l} exp={e}");
    }
}

#[test]
fn nine_tails_match_their_successor() {
    let nines = |int: i64| {
        DigitStream::from_truncations(false, move |n| Scalar::from_int(int + 1) - Scalar::pow10(n).recip().unwrap())
    };
    for int in 0..5 {
        assert_eq!(eq_check(&xi(&Scalar::from_int(int + 1)), &nines(int), 40), CheckVerdict::Consistent(40));
    }
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-10_000i64..10_000, 1i64..500).prop_map(|(p, d)| q(p, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn checkers_never_refute_true_relations(x in rational(), y in rational()) {
        let (sx, sy) = (xi(&x), xi(&y));
        prop_assert_eq!(eq_check(&sx, &xi(&x), 50), CheckVerdict::Consistent(50));
        prop_assert_eq!(arith_check(ArithOp::Add, &sx, &sy, &xi(&(&x + &y)), 50), CheckVerdict::Consistent(50));
        prop_assert_eq!(arith_check(ArithOp::Mul, &sx, &sy, &xi(&(&x * &y)), 50), CheckVerdict::Consistent(50));
    }

    #[test]
    fn far_apart_values_are_refuted_in_time(x in rational(), gap in 1i64..1000, n in 3u32..14) {
        let y = &x + &(&Scalar::from_int(gap) * &Scalar::pow10(n - 2).recip().unwrap());
        let v = eq_check(&xi(&x), &xi(&y), n);
        prop_assert!(v.is_refuted(), "{} vs {} at {}", x, y, n);
        let z = &(&x + &x) + &(&Scalar::from_int(gap) * &Scalar::pow10(n - 2).recip().unwrap());
        prop_assert!(arith_check(ArithOp::Add, &xi(&x), &xi(&x), &xi(&z), n).is_refuted());
    }

    #[test]
    fn refutation_is_permanent(x in rational(), y in rational()) {
        let (sx, sy) = (xi(&x), xi(&y));
        let mut refuted_at = None;
        for n in 1..=20 {
            match eq_check(&sx, &sy, n) {
                CheckVerdict::Refuted(k) => {
                    prop_assert!(k <= n);
                    prop_assert_eq!(*refuted_at.get_or_insert(k), k);
                }
                CheckVerdict::Consistent(m) => {
                    prop_assert_eq!(m, n);
                    prop_assert!(refuted_at.is_none());
                }
            }
        }
    }
}
