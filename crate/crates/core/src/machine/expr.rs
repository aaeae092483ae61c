//! Arithmetic expressions of the machine DSL, lowered to [`RatFn`].

use std::iter::Peekable;
use std::str::Chars;

use super::poly::{Poly, RatFn};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Scalar),
    Var(i64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// `None` if a divisor is identically zero.
    pub fn to_ratfn(&self) -> Option<RatFn> {
        Some(match self {
            Expr::Const(c) => RatFn::constant(c.clone()),
            Expr::Var(v) => RatFn::var(*v),
            Expr::Neg(e) => e.to_ratfn()?.neg(),
            Expr::Add(a, b) => a.to_ratfn()?.add(&b.to_ratfn()?),
            Expr::Sub(a, b) => a.to_ratfn()?.sub(&b.to_ratfn()?),
            Expr::Mul(a, b) => a.to_ratfn()?.mul(&b.to_ratfn()?),
            Expr::Div(a, b) => a.to_ratfn()?.div(&b.to_ratfn()?)?,
            Expr::Pow(a, e) => {
                let base = a.to_ratfn()?;
                let mut acc = RatFn::constant(Scalar::one());
                for _ in 0..*e {
                    acc = acc.mul(&base);
                }
                acc
            }
        })
    }

    /// Polynomial lowering; fails if the expression divides by anything but
    /// a nonzero constant.
    pub fn to_poly(&self) -> Option<Poly> {
        let r = self.to_ratfn()?;
        if r.is_polynomial() {
            Some(r.num)
        } else {
            None
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, String> {
    let mut p = ExprParser { chars: src.chars().peekable() };
    let e = p.sum()?;
    p.skip_ws();
    match p.chars.peek() {
        None => Ok(e),
        Some(c) => Err(format!("unexpected `{c}` in expression `{}`", src.trim())),
    }
}

struct ExprParser<'a> {
    chars: Peekable<Chars<'a>>,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.chars.peek() == Some(&want) {
            self.chars.next();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, String> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, String> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let digits = self.take_while(|c| c.is_ascii_digit());
            let e: u32 = digits.parse().map_err(|_| "exponent must be a natural number".to_string())?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if pred(c) {
                s.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        s
    }

    fn atom(&mut self) -> Result<Expr, String> {
        self.skip_ws();
        match self.chars.peek().copied() {
            Some('(') => {
                self.chars.next();
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err("missing `)`".into());
                }
                Ok(e)
            }
            Some('x') => {
                self.chars.next();
                if self.eat('[') {
                    self.skip_ws();
                    let neg = self.eat('-');
                    self.skip_ws();
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    if !self.eat(']') {
                        return Err("missing `]` in coordinate".into());
                    }
                    let v: i64 = digits.parse().map_err(|_| "bad coordinate index".to_string())?;
                    Ok(Expr::Var(if neg { -v } else { v }))
                } else {
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    let v: i64 = digits.parse().map_err(|_| "expected coordinate after `x`".to_string())?;
                    Ok(Expr::Var(v))
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let lit = self.take_while(|c| c.is_ascii_digit() || c == '.');
                let s: Scalar = lit.parse().map_err(|_| format!("non-rational literal `{lit}`"))?;
                Ok(Expr::Const(s))
            }
            Some(c) => Err(format!("unexpected `{c}` in expression")),
            None => Err("unexpected end of expression".into()),
        }
    }
}
