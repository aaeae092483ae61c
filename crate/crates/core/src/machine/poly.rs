//! Sparse multivariate polynomials and rational functions with exact
//! coefficients. Variables are integer-indexed (`x<i>`), which covers both
//! machine coordinates and the input variables of a path.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

/// A power product `x_{v1}^{e1} * ... ` kept sorted by variable with
/// positive exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(i64, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: i64) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(i64, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<i64, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().collect())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(v: i64) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(Monomial::var(v), Scalar::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn variables(&self) -> Vec<i64> {
        let mut vs: Vec<i64> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Coefficient of the greatest monomial, used to normalise rational
    /// functions.
    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.values().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn eval(&self, value: &dyn Fn(i64) -> Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                t = t * value(v).pow(e);
            }
            acc = acc + t;
        }
        acc
    }

    /// Evaluates over the field of rational functions, i.e. symbolic
    /// substitution of a rational function for every variable.
    pub fn compose(&self, value: &dyn Fn(i64) -> RatFn) -> RatFn {
        let mut acc = RatFn::zero();
        for (m, c) in &self.terms {
            let mut t = RatFn::constant(c.clone());
            for &(v, e) in m.factors() {
                let base = value(v);
                for _ in 0..e {
                    t = t.mul(&base);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, c.abs()) } else { (false, c.clone()) };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let has_vars = !m.0.is_empty();
            if !has_vars || !mag.is_one() {
                if mag.is_integer() {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
                if has_vars {
                    write!(f, "*")?;
                }
            }
            for (j, &(v, e)) in m.0.iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                if v < 0 {
                    write!(f, "x[{v}]")?;
                } else {
                    write!(f, "x{v}")?;
                }
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A quotient `num / den` of polynomials. Never reduced by polynomial gcd:
/// the denominator is exactly the product of the divisors met on the way,
/// which keeps "undefined" points identical to the interpreter's.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { num: Poly::zero(), den: Poly::constant(Scalar::one()) }
    }

    pub fn constant(c: Scalar) -> Self {
        RatFn { num: Poly::constant(c), den: Poly::constant(Scalar::one()) }
    }

    pub fn var(v: i64) -> Self {
        RatFn { num: Poly::var(v), den: Poly::constant(Scalar::one()) }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::constant(Scalar::one()) }
    }

    /// Builds `num/den`; `None` when `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(RatFn { num, den }.normalized())
    }

    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return RatFn::zero();
        }
        if let Some(c) = self.den.as_constant() {
            let inv = c.recip().expect("nonzero constant denominator");
            return RatFn::from_poly(self.num.scale(&inv));
        }
        let lead = self.den.leading_coefficient().cloned().expect("nonzero");
        if lead.is_one() {
            return self;
        }
        let inv = lead.recip().expect("nonzero leading coefficient");
        RatFn { num: self.num.scale(&inv), den: self.den.scale(&inv) }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        if self.den == other.den {
            return RatFn { num: self.num.add(&other.num), den: self.den.clone() }.normalized();
        }
        RatFn {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .normalized()
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }.normalized()
    }

    /// `None` when `other` is identically zero.
    pub fn div(&self, other: &RatFn) -> Option<RatFn> {
        if other.num.is_zero() {
            return None;
        }
        Some(
            RatFn { num: self.num.mul(&other.den), den: self.den.mul(&other.num) }.normalized(),
        )
    }

    /// `None` when the denominator vanishes at the point.
    pub fn eval(&self, value: &dyn Fn(i64) -> Scalar) -> Option<Scalar> {
        let d = self.den.eval(value);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval(value) / &d)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
