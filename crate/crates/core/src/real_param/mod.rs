//! Decimal expansions of reals as exact truncation streams, stage-wise
//! refutation of equality and arithmetic relations, and certified
//! enclosures of `ln` and `exp` built from Riemann sums of `1/t`.

mod ln;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Scalar;

pub use ln::{exp_cert, ln_bounds, ln_cert};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("ln is undefined at {0}")]
    NonPositive(Scalar),
    #[error("the Riemann bounds need x > 1, got {0}; use ln_cert")]
    NotAboveOne(Scalar),
    #[error("the number of subintervals must be at least 1")]
    ZeroSteps,
    #[error("precision must be positive, got {0}")]
    BadEps(Scalar),
}

/// Stage `n` to `floor(|x| * 10^n)`.
type Producer = Arc<dyn Fn(u32) -> BigInt + Send + Sync>;

/// A real given by its sign and the truncations of its magnitude.
#[derive(Clone)]
pub struct DigitStream {
    negative: bool,
    producer: Producer,
    source: Option<Scalar>,
}

impl DigitStream {
    /// A stream from arbitrary magnitude truncations. The producer must
    /// return a multiple of `10^-n` at stage `n`, nondecreasing in `n`, with
    /// `x_{n+1} - x_n < 10^-n`.
    pub fn from_truncations(negative: bool, producer: impl Fn(u32) -> Scalar + Send + Sync + 'static) -> Self {
        let scaled = move |n| (producer(n) * Scalar::pow10(n)).floor();
        DigitStream { negative, producer: Arc::new(scaled), source: None }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn source(&self) -> Option<&Scalar> {
        self.source.as_ref()
    }

    /// `x_n`, the truncation of `|x|` to `n` decimal places.
    pub fn truncation(&self, n: u32) -> Scalar {
        Scalar::from_parts((self.producer)(n), BigInt::from(10u32).pow(n))
    }

    /// `x_n * 10^n` with the stream's sign, an integer.
    pub fn scaled(&self, n: u32) -> BigInt {
        let t = (self.producer)(n);
        if self.negative {
            -t
        } else {
            t
        }
    }

    /// The truncation with the stream's sign; `-0` comes out as `0`.
    pub fn signed(&self, n: u32) -> Scalar {
        let t = self.truncation(n);
        if self.negative {
            -t
        } else {
            t
        }
    }

    /// Decimal digit `m` after the point (`m >= 1`); `m = 0` gives the
    /// integer part's last digit.
    pub fn digit(&self, m: u32) -> u8 {
        last_digit(&(self.producer)(m))
    }

    pub fn integer_part(&self) -> BigInt {
        self.truncation(0).floor()
    }
}

impl fmt::Debug for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negative { "-" } else { "+" };
        match &self.source {
            Some(s) => write!(f, "DigitStream({sign}, {s})"),
            None => write!(f, "DigitStream({sign}, {}...)", self.truncation(6).to_decimal(6)),
        }
    }
}

fn last_digit(scaled: &BigInt) -> u8 {
    u8::try_from(scaled.abs().mod_floor(&BigInt::from(10))).unwrap_or(0)
}

/// The decimal expansion of `x`: `x_n = floor(|x| * 10^n) / 10^n`.
pub fn xi(x: &Scalar) -> DigitStream {
    let mag = x.abs();
    DigitStream {
        negative: x.is_negative(),
        producer: Arc::new(move |n| (mag.numer() * BigInt::from(10u32).pow(n)).div_floor(mag.denom())),
        source: Some(x.clone()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckVerdict {
    /// Every stage up to this one passed.
    Consistent(u32),
    /// The first stage that failed.
    Refuted(u32),
}

impl CheckVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, CheckVerdict::Refuted(_))
    }
}

impl fmt::Display for CheckVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckVerdict::Consistent(n) => write!(f, "consistent@{n}"),
            CheckVerdict::Refuted(k) => write!(f, "refuted@{k}"),
        }
    }
}

fn stages(n: u32, mut pass: impl FnMut(u32) -> bool) -> CheckVerdict {
    (1..=n).find(|&k| !pass(k)).map_or(CheckVerdict::Consistent(n), CheckVerdict::Refuted)
}

/// Stage `k` passes when the signed truncations agree, or when they are
/// `10^-k` apart and the one of smaller magnitude ends in 9, so the pair
/// reads `...d99..9` against `...(d+1)00..0`.
fn eq_stage(x: &DigitStream, y: &DigitStream, k: u32) -> bool {
    let (a, b) = (x.scaled(k), y.scaled(k));
    if a == b {
        return true;
    }
    if a.is_negative() != b.is_negative() && !a.is_zero() && !b.is_zero() {
        return false;
    }
    let (ma, mb) = (a.abs(), b.abs());
    let (small, large) = if ma < mb { (ma, mb) } else { (mb, ma) };
    large - &small == BigInt::one() && last_digit(&small) == 9
}

/// Checks `x = y` at stages `1..=n`.
pub fn eq_check(x: &DigitStream, y: &DigitStream, n: u32) -> CheckVerdict {
    stages(n, |k| eq_stage(x, y, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
}

/// Checks `x + y = z` or `x * y = z` at stages `1..=n`:
/// `|x_k + y_k - z_k| <= 10^(1-k)` and
/// `|x_k y_k - z_k| <= 10^(1-k) (1 + |x_k| + |y_k|)` on signed truncations.
pub fn arith_check(op: ArithOp, x: &DigitStream, y: &DigitStream, z: &DigitStream, n: u32) -> CheckVerdict {
    stages(n, |k| {
        // Both sides multiplied by 10^k (add) or 10^2k (mul).
        let (a, b, c) = (x.scaled(k), y.scaled(k), z.scaled(k));
        let ten = BigInt::from(10);
        match op {
            ArithOp::Add => (a + b - c).abs() <= ten,
            ArithOp::Mul => {
                let p = BigInt::from(10u32).pow(k);
                (&a * &b - c * &p).abs() <= ten * (p + a.abs() + b.abs())
            }
        }
    })
}

/// A closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Enclosure {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        debug_assert!(lo <= hi, "empty enclosure");
        Enclosure { lo, hi }
    }

    pub fn point(x: Scalar) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Scalar {
        (&self.lo + &self.hi).checked_div(&Scalar::from_int(2)).expect("nonzero")
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn neg(&self) -> Self {
        Enclosure { lo: -&self.hi, hi: -&self.lo }
    }

    /// `lo` rounded down and `hi` rounded up to `digits` decimal places,
    /// so the printed interval still contains the enclosed value.
    pub fn to_decimal(&self, digits: u32) -> String {
        let p = Scalar::pow10(digits);
        let at = |n: BigInt| Scalar::from_bigint(n).checked_div(&p).expect("nonzero").to_decimal(digits);
        format!("[{}, {}]", at((&self.lo * &p).floor()), at((&self.hi * &p).ceil()))
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_pq(), self.hi.to_pq())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::new(p, d)
    }

    #[test]
    fn truncations_of_rationals() {
        assert_eq!(xi(&q(1, 3)).truncation(3), q(333, 1000));
        let h = xi(&q(-1, 2));
        assert!(h.is_negative());
        assert_eq!(h.truncation(2), q(1, 2));
        assert_eq!(h.signed(2), q(-1, 2));
        for n in 0..8 {
            assert_eq!(xi(&Scalar::one()).truncation(n), Scalar::one());
        }
        let s = xi(&q(22, 7));
        assert_eq!(s.integer_part(), BigInt::from(3));
        assert_eq!((1..=6).map(|m| s.digit(m)).collect::<Vec<_>>(), vec![1, 4, 2, 8, 5, 7]);
    }

    #[test]
    fn nines_and_refutation() {
        let nines = DigitStream::from_truncations(false, |n| Scalar::one() - Scalar::pow10(n).recip().unwrap());
        assert_eq!(eq_check(&xi(&Scalar::one()), &nines, 30), CheckVerdict::Consistent(30));
        assert_eq!(eq_check(&nines, &xi(&Scalar::one()), 30), CheckVerdict::Consistent(30));
        let neg_nines = DigitStream::from_truncations(true, |n| Scalar::one() - Scalar::pow10(n).recip().unwrap());
        assert_eq!(eq_check(&xi(&-Scalar::one()), &neg_nines, 30), CheckVerdict::Consistent(30));
        assert_eq!(eq_check(&xi(&q(1, 2)), &xi(&q(3, 5)), 1), CheckVerdict::Refuted(1));
        assert_eq!(eq_check(&xi(&q(22, 7)), &xi(&q(22, 7)), 50), CheckVerdict::Consistent(50));
        // sign of a tiny number is invisible until its first nonzero digit
        assert_eq!(eq_check(&xi(&q(1, 10_000)), &xi(&q(-1, 10_000)), 10), CheckVerdict::Refuted(4));
    }

    #[test]
    fn arithmetic_stages() {
        let z = xi(&Scalar::zero());
        assert_eq!(arith_check(ArithOp::Add, &z, &z, &z, 20), CheckVerdict::Consistent(20));
        assert_eq!(arith_check(ArithOp::Mul, &z, &z, &z, 20), CheckVerdict::Consistent(20));
        let one = xi(&Scalar::one());
        let three = xi(&Scalar::from_int(3));
        assert_eq!(arith_check(ArithOp::Add, &one, &one, &three, 1), CheckVerdict::Consistent(1));
        assert_eq!(arith_check(ArithOp::Add, &one, &one, &three, 2), CheckVerdict::Refuted(2));
        let third = xi(&q(1, 3));
        assert_eq!(arith_check(ArithOp::Add, &third, &third, &xi(&q(2, 3)), 40), CheckVerdict::Consistent(40));
        assert_eq!(arith_check(ArithOp::Mul, &third, &third, &xi(&q(1, 9)), 40), CheckVerdict::Consistent(40));
        assert_eq!(arith_check(ArithOp::Mul, &third, &third, &xi(&q(1, 8)), 40), CheckVerdict::Refuted(4));
    }

    #[test]
    fn verdict_and_enclosure_text() {
        assert_eq!(CheckVerdict::Consistent(7).to_string(), "consistent@7");
        assert_eq!(CheckVerdict::Refuted(2).to_string(), "refuted@2");
        assert_eq!(Enclosure::new(q(7, 12), q(5, 6)).to_string(), "[7/12, 5/6]");
        assert_eq!(Enclosure::new(q(7, 12), q(5, 6)).to_decimal(3), "[0.583, 0.834]");
        assert_eq!(Enclosure::new(q(-5, 6), q(-7, 12)).to_decimal(3), "[-0.834, -0.583]");
    }
}
