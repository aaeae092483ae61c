//! Riemann-sum bounds for `ln x = ∫_1^x dt/t` and the certified `ln`/`exp`
//! built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Enclosure, RealError};
use crate::Scalar;

/// The upper and lower Riemann sums of `1/t` over `[1, x]` with `n` equal
/// steps: `U_n = Σ_{k<n} h/(1+kh)`, `L_n = Σ_{1<=k<=n} h/(1+kh)`, `h = (x-1)/n`.
/// `U_n - L_n = (x-1)^2/(nx)`.
pub fn ln_bounds(x: &Scalar, n: u64) -> Result<Enclosure, RealError> {
    if x <= &Scalar::one() {
        return Err(RealError::NotAboveOne(x.clone()));
    }
    if n == 0 {
        return Err(RealError::ZeroSteps);
    }
    // With x = a/b, the k-th term is (a-b) / (nb + k(a-b)).
    let (a, b) = (x.numer(), x.denom());
    let d = a - b;
    let nb = b * BigInt::from(n);
    let term_den = |k: u64| &nb + &d * BigInt::from(k);
    // Σ_{0<k<n} accumulated over a running common denominator.
    let (mut num, mut den) = (BigInt::zero(), BigInt::one());
    for k in 1..n {
        let t = term_den(k);
        num = num * &t + &d * &den;
        den *= t;
    }
    let inner = Scalar::from_parts(num, den);
    let first = Scalar::from_parts(d.clone(), term_den(0));
    let last = Scalar::from_parts(d.clone(), term_den(n));
    Ok(Enclosure::new(&inner + &last, &inner + &first))
}

/// The Riemann sums again, each term rounded outward to a multiple of
/// `2^-bits`, so the result is a slightly wider enclosure of `ln x`.
fn rounded_bounds(x: &Scalar, n: u64, bits: u32) -> Enclosure {
    let (a, b) = (x.numer(), x.denom());
    let d = a - b;
    let scaled = &d << bits;
    let nb = b * BigInt::from(n);
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    for k in 0..=n {
        let den = &nb + &d * BigInt::from(k);
        let (q, r) = scaled.div_rem(&den);
        if k > 0 {
            lo += &q;
        }
        if k < n {
            hi += if r.is_zero() { q } else { q + 1 };
        }
    }
    let unit = BigInt::one() << bits;
    Enclosure::new(Scalar::from_parts(lo, unit.clone()), Scalar::from_parts(hi, unit))
}

fn floor_to(q: &Scalar, bits: u32) -> Scalar {
    let unit = BigInt::one() << bits;
    Scalar::from_parts((q.numer() * &unit).div_floor(q.denom()), unit)
}

fn ceil_to(q: &Scalar, bits: u32) -> Scalar {
    -floor_to(&-q, bits)
}

/// Least `e >= 0` with `2^-e <= eps`.
fn eps_bits(eps: &Scalar) -> u32 {
    let guess = eps.denom().bits() as i64 - eps.numer().bits() as i64;
    let mut e = guess.max(0) as u32;
    while e > 0 && Scalar::from_parts(BigInt::one(), BigInt::one() << (e - 1)) <= *eps {
        e -= 1;
    }
    while Scalar::from_parts(BigInt::one(), BigInt::one() << e) > *eps {
        e += 1;
    }
    e
}

/// Least `n` with `(x-1)^2/(nx) <= eps`.
fn steps_for(x: &Scalar, eps: &Scalar) -> u64 {
    let w = &(x - &Scalar::one()).pow(2) * &(x * eps).recip().expect("nonzero");
    u64::try_from(w.ceil()).unwrap_or(u64::MAX).max(1)
}

fn scale(k: u64, e: &Enclosure) -> Enclosure {
    let k = Scalar::from_bigint(BigInt::from(k));
    Enclosure::new(&k * &e.lo, &k * &e.hi)
}

/// An enclosure of `ln x` of width at most `eps`.
///
/// For `x > 1` the argument is divided by `r = 1 + 2^-j` until it drops
/// below `r`, with outward rounding, so `ln x = m ln r + ln y` with `y`
/// close to 1; each part then needs few Riemann steps. `0 < x < 1` goes
/// through `ln x = -ln(1/x)`.
pub fn ln_cert(x: &Scalar, eps: &Scalar) -> Result<Enclosure, RealError> {
    if !eps.is_positive() {
        return Err(RealError::BadEps(eps.clone()));
    }
    if !x.is_positive() {
        return Err(RealError::NonPositive(x.clone()));
    }
    if x.is_one() {
        return Ok(Enclosure::point(Scalar::zero()));
    }
    if x < &Scalar::one() {
        return Ok(ln_cert(&x.recip().expect("nonzero"), eps)?.neg());
    }
    let e = eps_bits(eps);
    let j = ((e + 1) / 2).saturating_sub(2).max(8);
    let r = &Scalar::one() + &Scalar::from_parts(BigInt::one(), BigInt::one() << j);
    let p = e + 2 * j + 24;
    let (mut ylo, mut yhi, mut m) = (x.clone(), x.clone(), 0u64);
    // Enclosures of r^(2^i), then greedy division keeping ylo >= 1.
    let mut powers = vec![(r.clone(), r.clone())];
    while powers.last().expect("nonempty").0 <= *x {
        let (lo, hi) = powers.last().expect("nonempty");
        powers.push((floor_to(&lo.pow(2), p + 40), ceil_to(&hi.pow(2), p + 40)));
    }
    for (i, (lo, hi)) in powers.iter().enumerate().rev() {
        if ylo >= *hi {
            ylo = floor_to(&ylo.checked_div(hi).expect("nonzero"), p);
            yhi = ceil_to(&yhi.checked_div(lo).expect("nonzero"), p);
            m += 1 << i;
        }
    }
    let quarter = eps.checked_div(&Scalar::from_int(4)).expect("nonzero");
    let one = Scalar::one();
    let mut boost = 1u64;
    loop {
        let bound = |y: &Scalar, upper: bool| -> Scalar {
            if y > &one {
                let n = steps_for(y, &quarter).saturating_mul(boost);
                let bits = e + 8 + 64 - n.leading_zeros();
                let b = rounded_bounds(y, n, bits);
                if upper {
                    b.hi
                } else {
                    b.lo
                }
            } else if upper {
                y - &one
            } else {
                &one - &y.recip().expect("y > 0")
            }
        };
        let mut enc = Enclosure::new(bound(&ylo, false), bound(&yhi, true));
        if m > 0 {
            let share = quarter.checked_div(&Scalar::from_bigint(BigInt::from(m))).expect("nonzero");
            let n = steps_for(&r, &share).saturating_mul(boost);
            let bits = e + 8 + 64 - n.leading_zeros() + (64 - m.leading_zeros());
            let lr = scale(m, &rounded_bounds(&r, n, bits));
            enc = Enclosure::new(&enc.lo + &lr.lo, &enc.hi + &lr.hi);
        }
        let out = Enclosure::new(floor_to(&enc.lo, e + 4), ceil_to(&enc.hi, e + 4));
        if &out.width() <= eps {
            return Ok(out);
        }
        boost *= 2;
    }
}

/// An enclosure of `e^x` of width at most `eps`, found by bisecting
/// `[0, max(4^ceil(x), 1)]` with sign tests `ln_cert(y) < x` or `> x`.
pub fn exp_cert(x: &Scalar, eps: &Scalar) -> Result<Enclosure, RealError> {
    if !eps.is_positive() {
        return Err(RealError::BadEps(eps.clone()));
    }
    if x.is_zero() {
        return Ok(Enclosure::point(Scalar::one()));
    }
    let c = x.ceil();
    let mut hi = if c.is_positive() {
        Scalar::from_int(4).pow(u32::try_from(&c).expect("exponent fits in u32"))
    } else {
        Scalar::one()
    };
    let mut lo = Scalar::zero();
    let sixteenth = Scalar::new(1, 16);
    while &(&hi - &lo) > eps {
        let span = &hi - &lo;
        let at = |num: i64| &lo + &(&span * &Scalar::new(num, 8));
        // e^x is irrational here, so each sign test ends; the cap on
        // rounds only moves on to a nearby point when it is slow.
        let mut settled = None;
        'points: for (i, y) in [at(4), at(5), at(3)].into_iter().enumerate() {
            let mut tol = Scalar::min(&Scalar::new(1, 4), &(&span * &hi.recip().expect("hi > 0")));
            for round in 0.. {
                let l = ln_cert(&y, &tol)?;
                if &l.hi < x {
                    settled = Some((y, true));
                    break 'points;
                }
                if &l.lo > x {
                    settled = Some((y, false));
                    break 'points;
                }
                if round >= 12 && i < 2 {
                    break;
                }
                tol = &tol * &sixteenth;
            }
        }
        let (y, below) = settled.expect("the last point is tested until it settles");
        if below {
            lo = y;
        } else {
            hi = y;
        }
        debug_assert!(lo < hi);
    }
    Ok(Enclosure::new(lo, hi))
}
