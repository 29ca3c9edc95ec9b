//! Tiny expression language for symbol evaluators, e.g. `sqrt(3)`,
//! `(sqrt(5)-1)/2` or `alpha*sqrt(3)`.

use crate::cf_arith::CfContext;
use crate::error::{Error, Result};
use crate::interval::RatInterval;
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Alpha,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let toks = tokenize(src)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Config(format!("trailing input in expression {src:?}")));
        }
        Ok(e)
    }

    /// Enclosure at working precision `bits`. The result width is not
    /// guaranteed to be below `2^-bits`; callers refine by raising `bits`.
    pub fn eval(&self, ctx: &CfContext, bits: u32) -> Result<RatInterval> {
        Ok(match self {
            Expr::Num(r) => RatInterval::point(r.clone()),
            Expr::Alpha => ctx.alpha_enclosure(bits)?,
            Expr::Neg(a) => -a.eval(ctx, bits)?,
            Expr::Add(a, b) => &a.eval(ctx, bits)? + &b.eval(ctx, bits)?,
            Expr::Sub(a, b) => &a.eval(ctx, bits)? - &b.eval(ctx, bits)?,
            Expr::Mul(a, b) => (&a.eval(ctx, bits)? * &b.eval(ctx, bits)?).round_out(bits + 8),
            Expr::Div(a, b) => {
                let den = b.eval(ctx, bits)?;
                let inv = den.recip().ok_or_else(|| {
                    Error::Numerical("division by an interval containing zero".into())
                })?;
                (&a.eval(ctx, bits)? * &inv).round_out(bits + 8)
            }
            Expr::Sqrt(a) => {
                let v = a.eval(ctx, bits)?;
                v.sqrt(bits + 2)
                    .ok_or_else(|| Error::Numerical("square root of a negative value".into()))?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = cs[start..i].iter().collect();
            out.push(Tok::Int(s.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Config(format!("unexpected character {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        if self.eat_op('(') {
            let e = self.expr()?;
            if !self.eat_op(')') {
                return Err(Error::Config("missing ')'".into()));
            }
            return Ok(e);
        }
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Num(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "alpha" => Ok(Expr::Alpha),
                    "sqrt" => {
                        if !self.eat_op('(') {
                            return Err(Error::Config("sqrt needs '('".into()));
                        }
                        let e = self.expr()?;
                        if !self.eat_op(')') {
                            return Err(Error::Config("missing ')'".into()));
                        }
                        Ok(Expr::Sqrt(Box::new(e)))
                    }
                    other => Err(Error::Config(format!("unknown identifier {other:?}"))),
                }
            }
            other => Err(Error::Config(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_encloses() {
        let ctx = CfContext::sqrt2_minus_1();
        let e = Expr::parse("alpha*sqrt(3) - 1/2").unwrap();
        let v = e.eval(&ctx, 60).unwrap();
        let truth = (2f64.sqrt() - 1.0) * 3f64.sqrt() - 0.5;
        assert!((v.to_f64() - truth).abs() < 1e-12);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("sqrt 3").is_err());
        assert!(Expr::parse("2 $ 3").is_err());
        assert!(Expr::parse("beta").is_err());
    }
}
