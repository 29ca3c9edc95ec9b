//! Exact reals as ℚ-linear combinations over a declared-independent basis.
//!
//! The first two basis symbols are always `1` and `α`. Further symbols carry
//! a certified evaluator and, optionally, the exact product `α·symbol`.
//! Linear independence over ℚ is an axiom of each [`Basis`] instance: a
//! [`SymReal`] is zero iff all its coordinates are zero.

pub mod expr;
pub mod linalg;

use crate::cf_arith::{CfContext, LinAlpha};
use crate::error::{Error, Result};
use crate::interval::RatInterval;
use crate::precision_cap;
use expr::Expr;
use linalg::{integer_kernel, solve_span, QMatrix, SpanSolution};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

pub const ONE: usize = 0;
pub const ALPHA: usize = 1;

/// Exact real number `Σ coords[i] · symbol_i`; trailing zero coordinates
/// are trimmed so that structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymReal {
    coords: Vec<BigRational>,
}

impl SymReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coords(mut coords: Vec<BigRational>) -> Self {
        while coords.last().is_some_and(|c| c.is_zero()) {
            coords.pop();
        }
        Self { coords }
    }

    pub fn rational(r: BigRational) -> Self {
        Self::from_coords(vec![r])
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(n.into(), d.into()))
    }

    /// `coeff · symbol_index`.
    pub fn symbol(index: usize, coeff: BigRational) -> Self {
        let mut c = vec![BigRational::zero(); index + 1];
        c[index] = coeff;
        Self::from_coords(c)
    }

    pub fn alpha() -> Self {
        Self::symbol(ALPHA, BigRational::one())
    }

    pub fn lin_alpha(r: BigRational, s: BigRational) -> Self {
        Self::from_coords(vec![r, s])
    }

    pub fn coord(&self, i: usize) -> BigRational {
        self.coords.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// Coordinates padded to `dim`.
    pub fn dense(&self, dim: usize) -> Vec<BigRational> {
        (0..dim).map(|i| self.coord(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Whether only the coordinate of `1` is nonzero.
    pub fn is_rational(&self) -> bool {
        self.coords.len() <= 1
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coord(ONE))
    }

    /// Whether the value lies in `ℚ + ℚα`.
    pub fn in_q_alpha(&self) -> bool {
        self.coords.len() <= 2
    }

    pub fn as_lin_alpha(&self) -> Option<LinAlpha> {
        self.in_q_alpha().then(|| LinAlpha::new(self.coord(ONE), self.coord(ALPHA)))
    }

    /// Whether every coordinate is an integer.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::from_coords(self.coords.iter().map(|c| c * k).collect())
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    /// `self + k` for rational `k`.
    pub fn add_rational(&self, k: &BigRational) -> Self {
        let mut c = self.dense(self.len().max(1));
        c[ONE] += k;
        Self::from_coords(c)
    }

    /// Product of two values when at least one is rational.
    pub fn mul_checked(&self, o: &Self) -> Result<Self> {
        if let Some(r) = o.as_rational() {
            Ok(self.scale(&r))
        } else if let Some(r) = self.as_rational() {
            Ok(o.scale(&r))
        } else {
            Err(Error::InsufficientStructure(
                "product of two irrational symbolic reals is not representable".into(),
            ))
        }
    }

    /// Integer combination `Σ kᵢ·valuesᵢ`.
    pub fn combination(values: &[SymReal], k: &[i64]) -> Self {
        values
            .iter()
            .zip(k)
            .filter(|(_, &k)| k != 0)
            .fold(SymReal::zero(), |acc, (v, &k)| &acc + &v.scale_int(k))
    }

    pub fn combination_big(values: &[SymReal], k: &[BigInt]) -> Self {
        values
            .iter()
            .zip(k)
            .filter(|(_, k)| !k.is_zero())
            .fold(SymReal::zero(), |acc, (v, k)| &acc + &v.scale(&BigRational::from_integer(k.clone())))
    }

    pub fn display<'a>(&'a self, basis: &'a Basis) -> SymDisplay<'a> {
        SymDisplay { x: self, basis }
    }
}

fn zip_with(a: &SymReal, b: &SymReal, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> SymReal {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    SymReal::from_coords(
        (0..n)
            .map(|i| f(a.coords.get(i).unwrap_or(&z), b.coords.get(i).unwrap_or(&z)))
            .collect(),
    )
}

impl Add for &SymReal {
    type Output = SymReal;
    fn add(self, o: &SymReal) -> SymReal {
        zip_with(self, o, |a, b| a + b)
    }
}

impl Sub for &SymReal {
    type Output = SymReal;
    fn sub(self, o: &SymReal) -> SymReal {
        zip_with(self, o, |a, b| a - b)
    }
}

impl Neg for &SymReal {
    type Output = SymReal;
    fn neg(self) -> SymReal {
        SymReal::from_coords(self.coords.iter().map(|c| -c).collect())
    }
}

impl Mul<&BigRational> for &SymReal {
    type Output = SymReal;
    fn mul(self, k: &BigRational) -> SymReal {
        self.scale(k)
    }
}

pub struct SymDisplay<'a> {
    x: &'a SymReal,
    basis: &'a Basis,
}

impl fmt::Display for SymDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sep = if first { "" } else { " + " };
            first = false;
            if i == ONE {
                write!(f, "{sep}{c}")?;
            } else {
                write!(f, "{sep}{c}*{}", self.basis.name(i))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum SymbolEval {
    One,
    Alpha,
    Expr(Expr),
}

#[derive(Debug, Clone)]
struct SymbolDef {
    name: String,
    eval: SymbolEval,
}

/// Membership targets for [`Basis::membership`].
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    /// `ℤ + ℤα`, with the coordinate of `1` read modulo 1 as for circle
    /// points: requires integer coordinates of `1` and `α`.
    ZPlusZAlphaMod1,
    QPlusQAlpha,
    QSpan(&'a [SymReal]),
    QAlphaSpan(&'a [SymReal]),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// The verdict follows from inspecting coordinates.
    Coordinates,
    /// `x = Σ cₖ·Sₖ`.
    Coefficients(Vec<BigRational>),
    /// `x = Σ (uₖ + vₖα)·Sₖ`.
    AlphaCoefficients(Vec<(BigRational, BigRational)>),
    /// A ℚ-linear functional on coordinates vanishing on the spanning set
    /// but not on `x`.
    Separator(Vec<BigRational>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub certificate: Certificate,
}

/// An ordered set of declared ℚ-independent reals beginning with `1, α`.
pub struct Basis {
    ctx: Arc<CfContext>,
    symbols: Vec<SymbolDef>,
    approx: Vec<f64>,
    /// Declared exact products `symbol_i · symbol_j`, keyed with `i ≤ j`.
    products: HashMap<(usize, usize), SymReal>,
    eval_cache: RwLock<HashMap<(usize, u32), RatInterval>>,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Basis")
            .field("symbols", &self.symbols.iter().map(|s| &s.name).collect::<Vec<_>>())
            .field("ctx", &self.ctx)
            .finish()
    }
}

impl Basis {
    /// The basis `{1, α}`. If `α` is a quadratic irrational the exact
    /// product `α·α` is derived from its continued fraction.
    pub fn new(ctx: Arc<CfContext>) -> Self {
        let sq = ctx.alpha_squared();
        let mut products = HashMap::new();
        if let Some((u, v)) = sq {
            products.insert((ALPHA, ALPHA), SymReal::lin_alpha(u, v));
        }
        let approx = vec![1.0, ctx.alpha_f64()];
        Self {
            ctx,
            symbols: vec![
                SymbolDef {
                    name: "1".into(),
                    eval: SymbolEval::One,
                },
                SymbolDef {
                    name: "alpha".into(),
                    eval: SymbolEval::Alpha,
                },
            ],
            approx,
            products,
            eval_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn ctx(&self) -> &Arc<CfContext> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.symbols[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Declares a new symbol with an evaluator expression; its ℚ-independence
    /// from the existing symbols is assumed, not checked.
    pub fn add_symbol(&mut self, name: &str, eval: &str) -> Result<usize> {
        if self.index_of(name).is_some() || name == "1" {
            return Err(Error::Config(format!("duplicate basis symbol {name:?}")));
        }
        let e = Expr::parse(eval)?;
        let v = e.eval(&self.ctx, 64)?;
        if !v.width_le_bits(40) {
            return Err(Error::Numerical(format!("evaluator for {name:?} does not converge")));
        }
        self.symbols.push(SymbolDef {
            name: name.into(),
            eval: SymbolEval::Expr(e),
        });
        self.approx.push(v.to_f64());
        Ok(self.symbols.len() - 1)
    }

    /// Declares `α·symbol = value` exactly.
    pub fn set_alpha_action(&mut self, name: &str, value: SymReal) -> Result<()> {
        self.set_product("alpha", name, value)
    }

    /// Declares `a·b = value` exactly. The declaration is checked
    /// numerically against the evaluators.
    pub fn set_product(&mut self, a: &str, b: &str, value: SymReal) -> Result<()> {
        let find = |n: &str| {
            self.index_of(n)
                .ok_or_else(|| Error::Config(format!("unknown basis symbol {n:?}")))
        };
        let (i, j) = (find(a)?, find(b)?);
        if i == ONE || j == ONE {
            return Err(Error::Config("products with 1 are implicit".into()));
        }
        if value.len() > self.dim() {
            return Err(Error::Config("product refers to unknown symbols".into()));
        }
        let lhs = &self.symbol_enclosure(i, 60)? * &self.symbol_enclosure(j, 60)?;
        let rhs = self.eval(&value, 60)?;
        let gap = &lhs - &rhs;
        if gap.sign().is_some() {
            return Err(Error::Config(format!(
                "declared product {a}*{b} disagrees with the evaluators"
            )));
        }
        self.products.insert((i.min(j), i.max(j)), value);
        Ok(())
    }

    /// Parses an exact literal such as `1 + b`, `-1/3*alpha + 2*alpha_b`
    /// or `b/2`. Each term is a product of integers, at most one basis
    /// symbol, and integer divisors.
    pub fn parse_literal(&self, src: &str) -> Result<SymReal> {
        let bad = |msg: &str| Error::Config(format!("bad literal {src:?}: {msg}"));
        let mut toks = Vec::new();
        let mut chars = src.chars().peekable();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c.is_ascii_digit() {
                let mut t = String::new();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    t.push(d);
                    chars.next();
                }
                toks.push(LitTok::Int(t.parse().map_err(|_| bad("integer"))?));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut t = String::new();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                    t.push(d);
                    chars.next();
                }
                toks.push(LitTok::Name(t));
            } else if "+-*/".contains(c) {
                toks.push(LitTok::Op(c));
                chars.next();
            } else {
                return Err(bad(&format!("unexpected {c:?}")));
            }
        }
        if toks.is_empty() {
            return Err(bad("empty"));
        }
        let mut out = SymReal::zero();
        let mut i = 0;
        while i < toks.len() {
            let mut coeff = BigRational::one();
            while let Some(LitTok::Op(op @ ('+' | '-'))) = toks.get(i) {
                if *op == '-' {
                    coeff = -coeff;
                }
                i += 1;
            }
            let mut symbol: Option<usize> = None;
            let mut expect_factor = true;
            let mut divide = false;
            while i < toks.len() {
                match &toks[i] {
                    LitTok::Op('*') if !expect_factor => expect_factor = true,
                    LitTok::Op('/') if !expect_factor => {
                        expect_factor = true;
                        divide = true;
                    }
                    LitTok::Op('+' | '-') if !expect_factor => break,
                    LitTok::Int(n) if expect_factor => {
                        let n = BigRational::from_integer(n.clone());
                        if divide {
                            if n.is_zero() {
                                return Err(bad("division by zero"));
                            }
                            coeff /= n;
                        } else {
                            coeff *= n;
                        }
                        expect_factor = false;
                        divide = false;
                    }
                    LitTok::Name(name) if expect_factor && !divide => {
                        if symbol.is_some() {
                            return Err(bad("product of two symbols"));
                        }
                        let idx = self.index_of(name).ok_or_else(|| bad(&format!("unknown symbol {name:?}")))?;
                        symbol = Some(idx);
                        expect_factor = false;
                    }
                    _ => return Err(bad("malformed term")),
                }
                i += 1;
            }
            if expect_factor {
                return Err(bad("dangling operator"));
            }
            out = &out + &SymReal::symbol(symbol.unwrap_or(ONE), coeff);
        }
        Ok(out)
    }

    /// Builds a value from named coordinates given as exact fraction strings.
    pub fn from_named_coords<'a>(&self, coords: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<SymReal> {
        let mut out = SymReal::zero();
        for (name, q) in coords {
            let idx = self
                .index_of(name)
                .ok_or_else(|| Error::Config(format!("unknown basis symbol {name:?}")))?;
            let r: BigRational = q
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad fraction {q:?} for {name:?}")))?;
            out = &out + &SymReal::symbol(idx, r);
        }
        Ok(out)
    }

    /// `coeff·symbol` by name.
    pub fn sym(&self, name: &str, coeff: BigRational) -> Result<SymReal> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::Config(format!("unknown basis symbol {name:?}")))?;
        Ok(SymReal::symbol(i, coeff))
    }

    fn symbol_enclosure(&self, i: usize, bits: u32) -> Result<RatInterval> {
        if let Some(v) = self.eval_cache.read().expect("eval cache").get(&(i, bits)) {
            return Ok(v.clone());
        }
        let v = match &self.symbols[i].eval {
            SymbolEval::One => RatInterval::point(BigRational::one()),
            SymbolEval::Alpha => self.ctx.alpha_enclosure(bits)?,
            SymbolEval::Expr(e) => {
                let cap = precision_cap();
                let mut w = bits + 16;
                loop {
                    let v = e.eval(&self.ctx, w)?;
                    if v.width_le_bits(bits) {
                        break v.round_out(bits + 2);
                    }
                    w = w.saturating_mul(2);
                    if w > 4 * cap {
                        return Err(Error::PrecisionExhausted { cap });
                    }
                }
            }
        };
        self.eval_cache
            .write()
            .expect("eval cache")
            .insert((i, bits), v.clone());
        Ok(v)
    }

    /// Certified enclosure of `x` of width at most `2^-bits`.
    pub fn eval(&self, x: &SymReal, bits: u32) -> Result<RatInterval> {
        let cap = precision_cap();
        if bits > cap {
            return Err(Error::PrecisionExhausted { cap });
        }
        let n = x.len() as u32;
        let mut acc = RatInterval::zero();
        for (i, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i == ONE {
                acc = &acc + &RatInterval::point(c.clone());
                continue;
            }
            let mag = c.abs().ceil().to_integer().bits() as u32;
            let need = bits + mag + 2 + (32 - n.leading_zeros());
            acc = &acc + &self.symbol_enclosure(i, need)?.scale(c);
        }
        Ok(acc)
    }

    /// Fast floating approximation with a rigorous absolute error bound.
    pub fn approx(&self, x: &SymReal) -> (f64, f64) {
        let mut v = 0.0;
        let mut mag = 0.0;
        let mut err = 0.0;
        for (i, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64().unwrap_or(f64::INFINITY);
            let t = cf * self.approx[i];
            v += t;
            mag += t.abs();
            err += cf.abs() * (self.approx[i].abs() * 4.0 * f64::EPSILON + 1e-18);
        }
        let n = x.len().max(1) as f64;
        (v, err + 4.0 * n * f64::EPSILON * mag + 1e-300)
    }

    pub fn to_f64(&self, x: &SymReal) -> f64 {
        self.approx(x).0
    }

    /// Exact sign of `x`.
    pub fn sign(&self, x: &SymReal) -> Result<i8> {
        if x.is_zero() {
            return Ok(0);
        }
        if let Some(r) = x.as_rational() {
            return Ok(if r.is_positive() { 1 } else { -1 });
        }
        if x.in_q_alpha() {
            return self.ctx.sign_linear(&x.coord(ONE), &x.coord(ALPHA));
        }
        let (v, e) = self.approx(x);
        if v.is_finite() && v.abs() > 2.0 * e {
            return Ok(if v > 0.0 { 1 } else { -1 });
        }
        let cap = precision_cap();
        let mut bits = 64;
        while bits <= cap {
            if let Some(s) = self.eval(x, bits)?.sign() {
                return Ok(s);
            }
            bits *= 2;
        }
        Err(Error::PrecisionExhausted { cap })
    }

    pub fn cmp(&self, a: &SymReal, b: &SymReal) -> Result<Ordering> {
        Ok(self.sign(&(a - b))?.cmp(&0))
    }

    pub fn abs(&self, x: &SymReal) -> Result<SymReal> {
        Ok(if self.sign(x)? < 0 { -x } else { x.clone() })
    }

    /// Exact `floor(x)`.
    pub fn floor(&self, x: &SymReal) -> Result<BigInt> {
        if let Some(r) = x.as_rational() {
            return Ok(r.floor().to_integer());
        }
        let (v, e) = self.approx(x);
        if v.is_finite() && v.abs() < 1e15 {
            let fl = v.floor();
            if v - fl > 2.0 * e && fl + 1.0 - v > 2.0 * e {
                return Ok(BigInt::from(fl as i64));
            }
        }
        let mut k = if v.is_finite() && v.abs() < 1e15 {
            BigInt::from(v.floor() as i64)
        } else {
            self.eval(x, 64)?.lo.floor().to_integer()
        };
        loop {
            if self.sign(&x.add_rational(&-BigRational::from_integer(k.clone())))? < 0 {
                k -= 1;
            } else if self.sign(&x.add_rational(&-BigRational::from_integer(&k + 1)))? >= 0 {
                k += 1;
            } else {
                return Ok(k);
            }
        }
    }

    /// Representative of `x` mod 1 in `[0, 1)`.
    pub fn circle(&self, x: &SymReal) -> Result<SymReal> {
        let k = self.floor(x)?;
        Ok(x.add_rational(&-BigRational::from_integer(k)))
    }

    /// Enclosure of `‖x‖`, the distance to the nearest integer.
    pub fn dist_to_int(&self, x: &SymReal, bits: u32) -> Result<RatInterval> {
        Ok(crate::cf_arith::dist_enclosure(&self.eval(x, bits + 1)?))
    }

    /// Exact comparison `‖x‖ < bound` for rational `bound ∈ (0, 1/2]`.
    pub fn dist_to_int_lt(&self, x: &SymReal, bound: &BigRational) -> Result<bool> {
        let f = self.circle(x)?;
        // ‖x‖ = min(f, 1 − f).
        let b = SymReal::rational(bound.clone());
        let lhs = self.sign(&(&b - &f))? > 0;
        let one_minus = (-&f).add_rational(&BigRational::one());
        let rhs = self.sign(&(&b - &one_minus))? > 0;
        Ok(lhs || rhs)
    }

    /// The exact product `α·x`, if every symbol of `x` has a declared action.
    pub fn alpha_times(&self, x: &SymReal) -> Result<SymReal> {
        self.mul(&SymReal::alpha(), x)
    }

    /// Exact product of two values, using the declared product table.
    pub fn mul(&self, x: &SymReal, y: &SymReal) -> Result<SymReal> {
        if let Some(r) = x.as_rational() {
            return Ok(y.scale(&r));
        }
        if let Some(r) = y.as_rational() {
            return Ok(x.scale(&r));
        }
        let mut acc = SymReal::zero();
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let c = a * b;
                let term = if i == ONE {
                    SymReal::symbol(j, c)
                } else if j == ONE {
                    SymReal::symbol(i, c)
                } else {
                    self.products
                        .get(&(i.min(j), i.max(j)))
                        .ok_or_else(|| {
                            Error::InsufficientStructure(format!(
                                "product {}*{} is not declared",
                                self.symbols[i].name, self.symbols[j].name
                            ))
                        })?
                        .scale(&c)
                };
                acc = &acc + &term;
            }
        }
        Ok(acc)
    }

    /// Decides membership of `x` in `target`, with a certificate.
    pub fn membership(&self, x: &SymReal, target: Target<'_>) -> Result<Membership> {
        match target {
            Target::ZPlusZAlphaMod1 => {
                let member = x.in_q_alpha() && x.coord(ONE).is_integer() && x.coord(ALPHA).is_integer();
                Ok(Membership {
                    member,
                    certificate: Certificate::Coordinates,
                })
            }
            Target::QPlusQAlpha => Ok(Membership {
                member: x.in_q_alpha(),
                certificate: Certificate::Coordinates,
            }),
            Target::QSpan(s) => {
                let dim = self.dim().max(x.len()).max(s.iter().map(|v| v.len()).max().unwrap_or(0));
                let gens: Vec<Vec<BigRational>> = s.iter().map(|v| v.dense(dim)).collect();
                Ok(match solve_span(&gens, &x.dense(dim), dim) {
                    SpanSolution::Coefficients(c) => Membership {
                        member: true,
                        certificate: Certificate::Coefficients(c),
                    },
                    SpanSolution::Separator(y) => Membership {
                        member: false,
                        certificate: Certificate::Separator(y),
                    },
                })
            }
            Target::QAlphaSpan(s) => {
                let mut ext: Vec<SymReal> = s.to_vec();
                for v in s {
                    ext.push(self.alpha_times(v)?);
                }
                let inner = self.membership(x, Target::QSpan(&ext))?;
                Ok(match inner.certificate {
                    Certificate::Coefficients(c) => {
                        let k = s.len();
                        Membership {
                            member: true,
                            certificate: Certificate::AlphaCoefficients(
                                (0..k).map(|i| (c[i].clone(), c[k + i].clone())).collect(),
                            ),
                        }
                    }
                    other => Membership {
                        member: false,
                        certificate: other,
                    },
                })
            }
        }
    }

    /// Basis of `{n ∈ ℤᵖ : Σ nᵢ·valuesᵢ = 0}`.
    pub fn relation_lattice(&self, values: &[SymReal]) -> Vec<Vec<BigInt>> {
        let dim = values.iter().map(|v| v.len()).max().unwrap_or(0);
        let m: QMatrix = (0..dim)
            .map(|i| values.iter().map(|v| v.coord(i)).collect())
            .collect();
        if dim == 0 {
            // All values zero: the full lattice.
            return (0..values.len())
                .map(|i| (0..values.len()).map(|j| BigInt::from((i == j) as i64)).collect())
                .collect();
        }
        integer_kernel(&m, values.len())
    }

    /// Integer coefficients `k` with `x = Σ kᵢ·valuesᵢ`, if `x` lies in the
    /// ℤ-span of `values`.
    pub fn integer_span(&self, values: &[SymReal], x: &SymReal) -> Option<Vec<BigInt>> {
        if x.is_zero() {
            return Some(vec![BigInt::zero(); values.len()]);
        }
        let mut ext = values.to_vec();
        ext.push(-x);
        // Kernel vectors (n, m) give Σ nᵢ·valuesᵢ = m·x; x is reachable iff
        // the last coordinates generate ℤ.
        let ker = self.relation_lattice(&ext);
        let p = values.len();
        let mut g = BigInt::zero();
        let mut comb: Vec<BigInt> = vec![BigInt::zero(); p + 1];
        for v in &ker {
            let e = num_integer::Integer::extended_gcd(&g, &v[p]);
            if e.gcd.is_zero() {
                continue;
            }
            comb = comb
                .iter()
                .zip(v)
                .map(|(c, w)| c * &e.x + w * &e.y)
                .collect();
            g = e.gcd;
        }
        if g.is_one() {
            Some(comb[..p].to_vec())
        } else if (-&g).is_one() {
            Some(comb[..p].iter().map(|c| -c).collect())
        } else {
            None
        }
    }

    /// Rank over ℚ of a family of values.
    pub fn rank(&self, values: &[SymReal]) -> usize {
        let dim = values.iter().map(|v| v.len()).max().unwrap_or(0);
        let m: QMatrix = (0..dim)
            .map(|i| values.iter().map(|v| v.coord(i)).collect())
            .collect();
        linalg::rank(&m)
    }
}

enum LitTok {
    Int(BigInt),
    Name(String),
    Op(char),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn basis_b() -> Basis {
        let mut b = Basis::new(Arc::new(CfContext::sqrt2_minus_1()));
        b.add_symbol("b", "sqrt(3)").unwrap();
        b.add_symbol("alpha_b", "alpha*sqrt(3)").unwrap();
        let ab = b.sym("alpha_b", q(1, 1)).unwrap();
        b.set_alpha_action("b", ab).unwrap();
        b
    }

    #[test]
    fn alpha_in_z_plus_z_alpha() {
        let b = basis_b();
        assert!(b.membership(&SymReal::alpha(), Target::ZPlusZAlphaMod1).unwrap().member);
    }

    #[test]
    fn third_is_rational_not_integral() {
        let b = basis_b();
        let x = SymReal::frac(1, 3);
        assert!(!b.membership(&x, Target::ZPlusZAlphaMod1).unwrap().member);
        assert!(b.membership(&x, Target::QPlusQAlpha).unwrap().member);
    }

    #[test]
    fn one_not_in_q_alpha_span_of_b() {
        let b = basis_b();
        let sb = b.sym("b", q(1, 1)).unwrap();
        let m = b.membership(&SymReal::int(1), Target::QAlphaSpan(&[sb])).unwrap();
        assert!(!m.member);
        assert!(matches!(m.certificate, Certificate::Separator(_)));
    }

    #[test]
    fn missing_alpha_action() {
        let mut b = Basis::new(Arc::new(CfContext::sqrt2_minus_1()));
        b.add_symbol("c", "sqrt(5)").unwrap();
        let sc = b.sym("c", q(1, 1)).unwrap();
        let r = b.membership(&SymReal::int(1), Target::QAlphaSpan(&[sc]));
        assert!(matches!(r, Err(Error::InsufficientStructure(_))));
    }

    #[test]
    fn lattice_examples() {
        let mut b = basis_b();
        b.add_symbol("c", "sqrt(5)").unwrap();
        let sb = b.sym("b", q(1, 1)).unwrap();
        let sc = b.sym("c", q(1, 1)).unwrap();
        let one = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(b.relation_lattice(&[sb.clone(), -&sb]), vec![one(&[1, 1])]);
        assert_eq!(
            b.relation_lattice(&[sb.clone(), sb.scale_int(2), sc.clone()]),
            vec![one(&[2, -1, 0])]
        );
        assert!(b.relation_lattice(&[sb, sc, SymReal::int(1)]).is_empty());
    }

    #[test]
    fn eval_examples() {
        let b = basis_b();
        assert_eq!(b.eval(&SymReal::zero(), 10).unwrap(), RatInterval::zero());
        let g = Basis::new(Arc::new(CfContext::golden()));
        let e = g.eval(&SymReal::alpha(), 40).unwrap();
        assert!(e.width_le_bits(40));
        assert!((e.to_f64() - 0.6180339887498949).abs() < 1e-11);
        let x = &SymReal::int(1) + &b.sym("b", q(1, 3)).unwrap();
        let e = b.eval(&x, 30).unwrap();
        assert!(e.width_le_bits(30));
        assert!((e.to_f64() - (1.0 + 3f64.sqrt() / 3.0)).abs() < 1e-8);
    }

    #[test]
    fn alpha_squared_from_cf() {
        let g = Basis::new(Arc::new(CfContext::golden()));
        // α² = 1 − α for the golden mean.
        assert_eq!(g.alpha_times(&SymReal::alpha()).unwrap(), SymReal::lin_alpha(q(1, 1), q(-1, 1)));
        let s = Basis::new(Arc::new(CfContext::sqrt2_minus_1()));
        // (√2−1)² = 3 − 2√2 = 1 − 2α.
        assert_eq!(s.alpha_times(&SymReal::alpha()).unwrap(), SymReal::lin_alpha(q(1, 1), q(-2, 1)));
    }

    #[test]
    fn floors_and_signs() {
        let b = basis_b();
        let sb = b.sym("b", q(1, 1)).unwrap();
        assert_eq!(b.floor(&sb).unwrap(), BigInt::from(1));
        assert_eq!(b.floor(&(-&sb)).unwrap(), BigInt::from(-2));
        let x = &sb.scale_int(1000) - &SymReal::int(1732);
        assert_eq!(b.sign(&x).unwrap(), 1);
    }

    #[test]
    fn integer_span_examples() {
        let b = basis_b();
        let sb = b.sym("b", q(1, 1)).unwrap();
        let vals = [sb.scale_int(2), sb.scale_int(3)];
        let k = b.integer_span(&vals, &sb).unwrap();
        assert_eq!(SymReal::combination_big(&vals, &k), sb);
        let vals = [sb.scale_int(2), sb.scale_int(4)];
        assert!(b.integer_span(&vals, &sb).is_none());
        assert!(b.integer_span(&vals, &SymReal::int(1)).is_none());
    }

    #[test]
    fn declared_products_are_checked() {
        let mut b = basis_b();
        let wrong = b.sym("b", q(1, 1)).unwrap();
        assert!(b.set_alpha_action("b", wrong).is_err());
    }

    #[test]
    fn literals() {
        let mut basis = Basis::new(Arc::new(CfContext::golden()));
        basis.add_symbol("b", "sqrt(3)").unwrap();
        let b = basis.sym("b", q(1, 1)).unwrap();
        assert_eq!(basis.parse_literal("1 + b").unwrap(), b.add_rational(&q(1, 1)));
        let x = basis.parse_literal("-1/3*alpha + 2*b - 4/2").unwrap();
        assert_eq!(x, &SymReal::lin_alpha(q(-2, 1), q(-1, 3)) + &b.scale_int(2));
        assert_eq!(basis.parse_literal("b/2").unwrap(), b.scale(&q(1, 2)));
        assert_eq!(basis.parse_literal("--b").unwrap(), b);
        for bad in ["", "b*b", "1/0", "2 +", "c", "1.5", "alpha b"] {
            assert!(basis.parse_literal(bad).is_err(), "{bad}");
        }
        let y = basis.from_named_coords([("1", "1/3"), ("b", "-1")]).unwrap();
        assert_eq!(y, &SymReal::frac(1, 3) - &b);
    }
}
