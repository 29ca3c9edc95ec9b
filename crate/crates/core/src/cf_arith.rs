//! Continued-fraction arithmetic for a fixed irrational `α ∈ (0, 1)`.
//!
//! `α` is carried by its partial quotients `[0; a₁, a₂, …]`; every numeric
//! question about `r + sα` is answered from convergent enclosures, so all
//! orderings and signs are exact.

use crate::error::{Error, Result};
use crate::interval::RatInterval;
use crate::precision_cap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, RwLock};

/// Denominator of the refinement grid used by [`CfContext::bpq_constant`].
pub const BPQ_GRID: i64 = 1000;

type DigitFn = dyn Fn(usize) -> u32 + Send + Sync;

#[derive(Clone)]
enum DigitSource {
    /// `prefix` followed by `period` repeated forever; an empty period means
    /// the digit supply ends after the prefix.
    Periodic { prefix: Vec<u32>, period: Vec<u32> },
    /// Aperiodic digits from a generator with a declared bound.
    Generator { generate: Arc<DigitFn>, bound: u32 },
}

/// An element `r + sα` of `ℚ + ℚα`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinAlpha {
    pub r: BigRational,
    pub s: BigRational,
}

impl LinAlpha {
    pub fn new(r: BigRational, s: BigRational) -> Self {
        Self { r, s }
    }

    pub fn from_ints(r: i64, s: i64) -> Self {
        Self::new(BigRational::from_integer(r.into()), BigRational::from_integer(s.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.r - &o.r, &self.s - &o.s)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.r + &o.r, &self.s + &o.s)
    }
}

/// Continued-fraction context for one irrational rotation number.
pub struct CfContext {
    source: DigitSource,
    /// `(p_n, q_n)` for `n = 0..len`; extended under the write lock only.
    cache: RwLock<Vec<(BigInt, BigInt)>>,
    approx: f64,
}

impl fmt::Debug for CfContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            DigitSource::Periodic { prefix, period } => f
                .debug_struct("CfContext")
                .field("prefix", prefix)
                .field("period", period)
                .field("approx", &self.approx)
                .finish(),
            DigitSource::Generator { bound, .. } => f
                .debug_struct("CfContext")
                .field("generator_bound", bound)
                .field("approx", &self.approx)
                .finish(),
        }
    }
}

/// Largest certified grid constant `c` with `‖jα‖ ≥ c/|j|` and
/// `q_{n+1}/q_n ≤ 1/c`, together with the bounds that certify it.
#[derive(Debug, Clone)]
pub struct BpqConstant {
    pub c: BigRational,
    pub j_max: u64,
    /// `(j, lower bound of j·‖jα‖)` for every scanned `j`.
    pub diophantine: Vec<(u64, BigRational)>,
    /// `(n, q_n / q_{n+1})` for every checked index.
    pub ratios: Vec<(usize, BigRational)>,
}

/// Extreme gap lengths of a finite orbit partition of the circle.
#[derive(Debug, Clone)]
pub struct GapStats {
    pub points: usize,
    pub min_gap: LinAlpha,
    pub max_gap: LinAlpha,
    pub min_gap_f64: f64,
    pub max_gap_f64: f64,
    /// Number of distinct gap lengths (exact equality).
    pub distinct_gaps: usize,
}

impl CfContext {
    fn from_source(source: DigitSource) -> Result<Self> {
        let ctx = Self {
            source,
            cache: RwLock::new(vec![(BigInt::zero(), BigInt::one())]),
            approx: 0.0,
        };
        let mut ctx = ctx;
        ctx.approx = ctx.alpha_enclosure(64)?.to_f64();
        Ok(ctx)
    }

    /// `α = [0; prefix, period, period, …]`. An empty period gives a finite
    /// digit supply; requests past it fail with [`Error::DigitsExhausted`].
    pub fn periodic(prefix: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if prefix.is_empty() && period.is_empty() {
            return Err(Error::Config("empty partial-quotient sequence".into()));
        }
        if prefix.iter().chain(&period).any(|&a| a == 0) {
            return Err(Error::Config("partial quotients must be positive".into()));
        }
        Self::from_source(DigitSource::Periodic { prefix, period })
    }

    /// Aperiodic bounded digits; `bound` is the declared `sup aₙ` and is
    /// trusted, not inferred.
    pub fn with_generator<F>(generate: F, bound: u32) -> Result<Self>
    where
        F: Fn(usize) -> u32 + Send + Sync + 'static,
    {
        Self::from_source(DigitSource::Generator {
            generate: Arc::new(generate),
            bound,
        })
    }

    /// `(√5 − 1)/2 = [0; 1, 1, 1, …]`.
    pub fn golden() -> Self {
        Self::periodic(vec![], vec![1]).expect("golden preset")
    }

    /// `√2 − 1 = [0; 2, 2, 2, …]`.
    pub fn sqrt2_minus_1() -> Self {
        Self::periodic(vec![], vec![2]).expect("sqrt2m1 preset")
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "golden" => Ok(Self::golden()),
            "sqrt2m1" => Ok(Self::sqrt2_minus_1()),
            other => Err(Error::Config(format!("unknown alpha preset {other:?}"))),
        }
    }

    /// Number of available partial quotients, `None` if unbounded.
    pub fn digits_available(&self) -> Option<usize> {
        match &self.source {
            DigitSource::Periodic { prefix, period } if period.is_empty() => Some(prefix.len()),
            _ => None,
        }
    }

    /// Partial quotient `a_n`, `n ≥ 1`.
    pub fn digit(&self, n: usize) -> Result<u32> {
        assert!(n >= 1, "partial quotients are indexed from 1");
        match &self.source {
            DigitSource::Periodic { prefix, period } => {
                if n <= prefix.len() {
                    Ok(prefix[n - 1])
                } else if period.is_empty() {
                    Err(Error::DigitsExhausted {
                        needed: n,
                        available: prefix.len(),
                    })
                } else {
                    Ok(period[(n - 1 - prefix.len()) % period.len()])
                }
            }
            DigitSource::Generator { generate, bound } => {
                let a = generate(n);
                if a == 0 || a > *bound {
                    return Err(Error::Config(format!(
                        "generated partial quotient a_{n} = {a} outside [1, {bound}]"
                    )));
                }
                Ok(a)
            }
        }
    }

    /// `sup aₙ` over the declared digit range.
    pub fn partial_quotient_sup(&self) -> u32 {
        match &self.source {
            DigitSource::Periodic { prefix, period } => {
                prefix.iter().chain(period).copied().max().unwrap_or(1)
            }
            DigitSource::Generator { bound, .. } => *bound,
        }
    }

    /// `C = sup aₙ + 1`.
    pub fn big_c(&self) -> u64 {
        self.partial_quotient_sup() as u64 + 1
    }

    /// Whether the tail is eventually periodic (a quadratic irrational).
    pub fn is_quadratic(&self) -> bool {
        matches!(&self.source, DigitSource::Periodic { period, .. } if !period.is_empty())
    }

    /// For quadratic `α`, the exact `(u, v)` with `α² = u + vα`, derived
    /// from the periodic tail.
    pub fn alpha_squared(&self) -> Option<(BigRational, BigRational)> {
        let DigitSource::Periodic { prefix, period } = &self.source else {
            return None;
        };
        if period.is_empty() {
            return None;
        }
        type M2 = [[BigInt; 2]; 2];
        let mul = |a: &M2, b: &M2| -> M2 {
            [
                [&a[0][0] * &b[0][0] + &a[0][1] * &b[1][0], &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1]],
                [&a[1][0] * &b[0][0] + &a[1][1] * &b[1][0], &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1]],
            ]
        };
        let step = |a: u32| -> M2 { [[BigInt::from(a), BigInt::one()], [BigInt::one(), BigInt::zero()]] };
        // α = N(β) as a Möbius map, β = [period; period, …] = M(β).
        let mut n: M2 = [[BigInt::zero(), BigInt::one()], [BigInt::one(), BigInt::zero()]];
        for &a in prefix {
            n = mul(&n, &step(a));
        }
        let mut m: M2 = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
        for &a in period {
            m = mul(&m, &step(a));
        }
        let t = &m[1][1] - &m[0][0];
        let a = &m[1][0] * &n[1][1] * &n[1][1] - &t * &n[1][1] * &n[1][0] - &m[0][1] * &n[1][0] * &n[1][0];
        let b = BigInt::from(-2) * &m[1][0] * &n[1][1] * &n[0][1]
            + &t * (&n[1][1] * &n[0][0] + &n[0][1] * &n[1][0])
            + BigInt::from(2) * &m[0][1] * &n[0][0] * &n[1][0];
        let c = &m[1][0] * &n[0][1] * &n[0][1] - &t * &n[0][1] * &n[0][0] - &m[0][1] * &n[0][0] * &n[0][0];
        if a.is_zero() {
            return None;
        }
        let a = BigRational::from_integer(a);
        Some((-BigRational::from_integer(c) / &a, -BigRational::from_integer(b) / &a))
    }

    fn ensure(&self, n: usize) -> Result<()> {
        if self.cache.read().expect("cf cache poisoned").len() > n {
            return Ok(());
        }
        let mut cache = self.cache.write().expect("cf cache poisoned");
        while cache.len() <= n {
            let k = cache.len();
            let a = BigInt::from(self.digit(k)?);
            let next = if k == 1 {
                (BigInt::one(), a)
            } else {
                let (p1, q1) = &cache[k - 1];
                let (p2, q2) = &cache[k - 2];
                (&a * p1 + p2, &a * q1 + q2)
            };
            cache.push(next);
        }
        Ok(())
    }

    /// `(p_n, q_n)`.
    pub fn convergent(&self, n: usize) -> Result<(BigInt, BigInt)> {
        self.ensure(n)?;
        Ok(self.cache.read().expect("cf cache poisoned")[n].clone())
    }

    /// `(p_k, q_k)` for `k = 0..=n`.
    pub fn convergents(&self, n: usize) -> Result<Vec<(BigInt, BigInt)>> {
        self.ensure(n)?;
        Ok(self.cache.read().expect("cf cache poisoned")[..=n].to_vec())
    }

    pub fn q(&self, n: usize) -> Result<BigInt> {
        Ok(self.convergent(n)?.1)
    }

    /// `q_n` as a machine integer; panics if it does not fit.
    pub fn q_u64(&self, n: usize) -> Result<u64> {
        Ok(self.q(n)?.to_u64().expect("q_n exceeds u64"))
    }

    /// Smallest `n` with `q_n ≥ bound`.
    pub fn first_index_with_q_at_least(&self, bound: &BigInt) -> Result<usize> {
        let mut n = 0;
        loop {
            if &self.q(n)? >= bound {
                return Ok(n);
            }
            n += 1;
        }
    }

    pub fn alpha_f64(&self) -> f64 {
        self.approx
    }

    /// Certified enclosure of `α` of width at most `2^-bits`, bracketed by two
    /// consecutive convergents.
    pub fn alpha_enclosure(&self, bits: u32) -> Result<RatInterval> {
        let target = BigInt::one() << bits as usize;
        let mut n = 1;
        loop {
            let (p0, q0) = self.convergent(n)?;
            let (p1, q1) = self.convergent(n + 1)?;
            if &q0 * &q1 >= target {
                let a = BigRational::new(p0, q0);
                let b = BigRational::new(p1, q1);
                return Ok(if a <= b {
                    RatInterval::new(a, b)
                } else {
                    RatInterval::new(b, a)
                });
            }
            n += 1;
        }
    }

    /// `floor(α · 2^64)`; exact, since `α · 2^64` is irrational.
    pub fn alpha_fixed64(&self) -> Result<u64> {
        let e = self.alpha_enclosure(72)?;
        let scale = crate::interval::pow2(64);
        let (lo, hi) = (&e.lo * &scale, &e.hi * &scale);
        let fl = lo.floor().to_integer();
        if hi.floor().to_integer() != fl {
            // Refine once more; a 72-bit enclosure only straddles an integer
            // boundary when α·2^64 is within 2^-8 of it.
            let e = self.alpha_enclosure(160)?;
            let fl2 = (&e.lo * &scale).floor().to_integer();
            return Ok(fl2.to_u64().expect("alpha < 1"));
        }
        Ok(fl.to_u64().expect("alpha < 1"))
    }

    fn f64_sign_hint(r: &BigRational, s: &BigRational, alpha: f64) -> Option<i8> {
        let rf = r.to_f64()?;
        let sf = s.to_f64()?;
        let v = rf + sf * alpha;
        let err = 8.0 * f64::EPSILON * (rf.abs() + sf.abs()) + 1e-300;
        if v > err {
            Some(1)
        } else if v < -err {
            Some(-1)
        } else {
            None
        }
    }

    /// Certified enclosure of `r + sα` of width at most `2^-bits`.
    pub fn linear_enclosure(&self, r: &BigRational, s: &BigRational, bits: u32) -> Result<RatInterval> {
        if s.is_zero() {
            return Ok(RatInterval::point(r.clone()));
        }
        let extra = s.abs().ceil().to_integer().bits() as u32 + 1;
        let a = self.alpha_enclosure(bits + extra)?;
        Ok(&RatInterval::point(r.clone()) + &a.scale(s))
    }

    /// Exact sign of `r + sα`; zero only when `r = s = 0`.
    pub fn sign_linear(&self, r: &BigRational, s: &BigRational) -> Result<i8> {
        if s.is_zero() {
            return Ok(sign_of(r));
        }
        if let Some(sg) = Self::f64_sign_hint(r, s, self.approx) {
            return Ok(sg);
        }
        let cap = precision_cap();
        let mut bits = 64;
        loop {
            if bits > cap {
                return Err(Error::PrecisionExhausted { cap });
            }
            if let Some(sg) = self.linear_enclosure(r, s, bits)?.sign() {
                return Ok(sg);
            }
            bits *= 2;
        }
    }

    pub fn cmp_linear(&self, a: &LinAlpha, b: &LinAlpha) -> Result<Ordering> {
        let d = a.sub(b);
        Ok(self.sign_linear(&d.r, &d.s)?.cmp(&0))
    }

    /// `floor(r + sα)`.
    pub fn floor_linear(&self, r: &BigRational, s: &BigRational) -> Result<BigInt> {
        let approx = r.to_f64().unwrap_or(0.0) + s.to_f64().unwrap_or(0.0) * self.approx;
        let mut k = BigInt::from(approx.floor() as i64);
        // Walk to the exact floor; at most a couple of steps.
        loop {
            let below = self.sign_linear(&(r - BigRational::from_integer(k.clone())), s)?;
            if below < 0 {
                k -= 1;
                continue;
            }
            let above = self.sign_linear(&(r - BigRational::from_integer(&k + 1)), s)?;
            if above >= 0 {
                k += 1;
                continue;
            }
            return Ok(k);
        }
    }

    /// The representative of `r + sα` mod 1 in `[0, 1)`.
    pub fn frac_linear(&self, x: &LinAlpha) -> Result<LinAlpha> {
        let k = self.floor_linear(&x.r, &x.s)?;
        Ok(LinAlpha::new(&x.r - BigRational::from_integer(k), x.s.clone()))
    }

    /// Certified enclosure of `‖r + sα‖` of width at most `2^-bits`.
    pub fn dist_to_int(&self, r: &BigRational, s: &BigRational, bits: u32) -> Result<RatInterval> {
        let e = self.linear_enclosure(r, s, bits + 1)?;
        Ok(dist_enclosure(&e))
    }

    /// Largest grid constant `c = k/1000 < 1` with `‖jα‖ ≥ c/j` for
    /// `1 ≤ j ≤ j_max` and `q_{n+1}/q_n ≤ 1/c` over the checked convergents.
    pub fn bpq_constant(&self, j_max: u64) -> Result<BpqConstant> {
        if j_max < 1 {
            return Err(Error::Precondition("j_max must be at least 1".into()));
        }
        let mut diophantine = Vec::with_capacity(j_max as usize);
        let mut bound = BigRational::one();
        for j in 1..=j_max {
            let jr = BigRational::from_integer(j.into());
            let d = self.dist_to_int(&BigRational::zero(), &jr, 80)?;
            let lb = &d.lo * &jr;
            if lb < bound {
                bound = lb.clone();
            }
            diophantine.push((j, lb));
        }
        // Ratio checks cover every n with q_n ≤ j_max plus one full period
        // (or a fixed depth for generated digits), which for eventually
        // periodic α covers all n.
        let extra = match &self.source {
            DigitSource::Periodic { prefix, period } => prefix.len() + period.len().max(1) + 1,
            DigitSource::Generator { .. } => 64,
        };
        let jm = BigInt::from(j_max);
        let mut ratios = Vec::new();
        let mut n = 0;
        let mut past = 0;
        loop {
            let qn = match self.q(n) {
                Ok(q) => q,
                Err(Error::DigitsExhausted { .. }) => break,
                Err(e) => return Err(e),
            };
            let qn1 = match self.q(n + 1) {
                Ok(q) => q,
                Err(Error::DigitsExhausted { .. }) => break,
                Err(e) => return Err(e),
            };
            let ratio = BigRational::new(qn.clone(), qn1);
            if ratio < bound {
                bound = ratio.clone();
            }
            ratios.push((n, ratio));
            if qn > jm {
                past += 1;
                if past > extra {
                    break;
                }
            }
            n += 1;
        }
        let grid = BigRational::from_integer(BPQ_GRID.into());
        let mut k = (&bound * &grid).floor().to_integer();
        if k >= BigInt::from(BPQ_GRID) {
            k = BigInt::from(BPQ_GRID - 1);
        }
        // Strictness of the grid: c must satisfy the bounds non-strictly.
        let c = BigRational::new(k.clone(), BPQ_GRID.into());
        if k <= BigInt::zero() {
            return Err(Error::Precondition(
                "no positive grid constant satisfies the Diophantine bounds".into(),
            ));
        }
        Ok(BpqConstant {
            c,
            j_max,
            diophantine,
            ratios,
        })
    }

    /// Extreme gaps of the partition of the circle by `{0, −α, …, −(m−1)α}`,
    /// optionally joined with `{β, β−α, …, β−(m−1)α}`. Coincident points are
    /// merged.
    pub fn orbit_partition_gaps(&self, m: u64, beta: Option<&LinAlpha>) -> Result<GapStats> {
        if m < 1 {
            return Err(Error::Precondition("m must be at least 1".into()));
        }
        let mut pts: Vec<(LinAlpha, f64)> = Vec::with_capacity(2 * m as usize);
        let mut push = |base: &LinAlpha, j: u64| -> Result<()> {
            let raw = LinAlpha::new(base.r.clone(), &base.s - BigRational::from_integer(j.into()));
            let p = self.frac_linear(&raw)?;
            let v = p.r.to_f64().unwrap() + p.s.to_f64().unwrap() * self.approx;
            pts.push((p, v));
            Ok(())
        };
        let zero = LinAlpha::from_ints(0, 0);
        for j in 0..m {
            push(&zero, j)?;
        }
        if let Some(b) = beta {
            for j in 0..m {
                push(b, j)?;
            }
        }
        self.sort_points(&mut pts)?;
        pts.dedup_by(|a, b| a.0 == b.0);
        let n = pts.len();
        let mut gaps: Vec<LinAlpha> = Vec::with_capacity(n);
        for w in pts.windows(2) {
            gaps.push(w[1].0.sub(&w[0].0));
        }
        let wrap = LinAlpha::new(&pts[0].0.r + BigRational::one(), pts[0].0.s.clone()).sub(&pts[n - 1].0);
        gaps.push(wrap);
        let mut min = gaps[0].clone();
        let mut max = gaps[0].clone();
        for g in &gaps[1..] {
            if self.cmp_linear(g, &min)? == Ordering::Less {
                min = g.clone();
            }
            if self.cmp_linear(g, &max)? == Ordering::Greater {
                max = g.clone();
            }
        }
        let mut distinct: Vec<&LinAlpha> = gaps.iter().collect();
        distinct.sort_by(|a, b| (&a.r, &a.s).cmp(&(&b.r, &b.s)));
        distinct.dedup();
        let to_f = |x: &LinAlpha| x.r.to_f64().unwrap() + x.s.to_f64().unwrap() * self.approx;
        Ok(GapStats {
            points: n,
            min_gap_f64: to_f(&min),
            max_gap_f64: to_f(&max),
            min_gap: min,
            max_gap: max,
            distinct_gaps: distinct.len(),
        })
    }

    fn sort_points(&self, pts: &mut [(LinAlpha, f64)]) -> Result<()> {
        let mut failure = None;
        pts.sort_by(|a, b| {
            if (a.1 - b.1).abs() > 1e-9 {
                return a.1.partial_cmp(&b.1).unwrap();
            }
            match self.cmp_linear(&a.0, &b.0) {
                Ok(o) => o,
                Err(e) => {
                    failure = Some(e);
                    Ordering::Equal
                }
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Checks the recurrence and the sandwich
    /// `1/(2q_n q_{n+1}) < |α − p_n/q_n| < 1/(q_n q_{n+1})` for `n ≤ n_max`.
    pub fn check_sandwich(&self, n_max: usize) -> Result<bool> {
        let conv = self.convergents(n_max + 1)?;
        for n in 0..=n_max {
            if n >= 2 {
                let a = BigInt::from(self.digit(n)?);
                if conv[n].1 != &a * &conv[n - 1].1 + &conv[n - 2].1
                    || conv[n].0 != &a * &conv[n - 1].0 + &conv[n - 2].0
                {
                    return Ok(false);
                }
            }
            let (p, q) = &conv[n];
            let q1 = &conv[n + 1].1;
            // |α − p/q| via sign-exact comparisons against the two bounds.
            let qq = BigRational::from_integer(q * q1);
            let upper = qq.recip();
            let lower = upper.clone() / BigRational::from_integer(2.into());
            let diff_r = BigRational::new(-p.clone(), q.clone());
            let s = self.sign_linear(&diff_r, &BigRational::one())?;
            let sr = BigRational::from_integer(s.into());
            // s·(α − p/q) − bound has sign −1 / +1 respectively.
            let below_upper = self.sign_linear(&(&diff_r * &sr - &upper), &sr)? < 0;
            let above_lower = self.sign_linear(&(&diff_r * &sr - &lower), &sr)? > 0;
            if !(below_upper && above_lower) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Enclosure of `‖v‖` from an enclosure of `v`.
pub fn dist_enclosure(e: &RatInterval) -> RatInterval {
    let n = BigRational::from_integer(e.lo.floor().to_integer());
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    let d = |x: &BigRational| {
        let f = x - x.floor();
        if f > half {
            &one - f
        } else {
            f
        }
    };
    if e.hi >= &n + &one {
        // Contains the integer n+1.
        let m = std::cmp::max(d(&e.lo), d(&e.hi));
        return RatInterval::new(BigRational::zero(), m);
    }
    let mid = &n + &half;
    if e.hi <= mid {
        RatInterval::new(&e.lo - &n, &e.hi - &n)
    } else if e.lo >= mid {
        RatInterval::new(&n + &one - &e.hi, &n + &one - &e.lo)
    } else {
        RatInterval::new(std::cmp::min(&e.lo - &n, &n + &one - &e.hi), half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn golden_denominators() {
        let ctx = CfContext::golden();
        let q: Vec<i64> = ctx.convergents(4).unwrap().iter().map(|c| c.1.to_i64().unwrap()).collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5]);
    }

    #[test]
    fn silver_denominators() {
        let ctx = CfContext::sqrt2_minus_1();
        let q: Vec<i64> = ctx.convergents(4).unwrap().iter().map(|c| c.1.to_i64().unwrap()).collect();
        assert_eq!(q, vec![1, 2, 5, 12, 29]);
    }

    #[test]
    fn index_zero_convergent() {
        let ctx = CfContext::golden();
        assert_eq!(ctx.convergent(0).unwrap(), (BigInt::zero(), BigInt::one()));
    }

    #[test]
    fn exhausted_digits() {
        let ctx = CfContext::periodic(vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30], vec![]).unwrap();
        assert!(matches!(ctx.convergent(31), Err(Error::DigitsExhausted { needed: 31, .. })));
        assert!(ctx.convergent(30).is_ok());
    }

    #[test]
    fn signs() {
        let silver = CfContext::sqrt2_minus_1();
        let golden = CfContext::golden();
        assert_eq!(silver.sign_linear(&r(0, 1), &r(0, 1)).unwrap(), 0);
        assert_eq!(silver.sign_linear(&r(1, 1), &r(-2, 1)).unwrap(), 1);
        assert_eq!(golden.sign_linear(&r(-2, 1), &r(5, 1)).unwrap(), 1);
        // Near-cancellation forces the slow path: p_40 − q_40 α.
        let (p, q) = golden.convergent(40).unwrap();
        let s = golden
            .sign_linear(&BigRational::from_integer(p), &BigRational::from_integer(-q))
            .unwrap();
        // Even-index convergents lie below α.
        assert_eq!(s, -1);
    }

    #[test]
    fn dist_golden() {
        let golden = CfContext::golden();
        let d = golden.dist_to_int(&r(0, 1), &r(1, 1), 50).unwrap();
        let expect = 1.0 - (5f64.sqrt() - 1.0) / 2.0;
        assert!((d.to_f64() - expect).abs() < 1e-12);
        assert_eq!(golden.dist_to_int(&r(0, 1), &r(0, 1), 10).unwrap(), RatInterval::zero());
    }

    #[test]
    fn sandwich_holds() {
        assert!(CfContext::golden().check_sandwich(20).unwrap());
        assert!(CfContext::sqrt2_minus_1().check_sandwich(20).unwrap());
    }

    #[test]
    fn single_orbit_point() {
        let g = CfContext::golden().orbit_partition_gaps(1, None).unwrap();
        assert_eq!(g.min_gap, LinAlpha::from_ints(1, 0));
        assert_eq!(g.max_gap, LinAlpha::from_ints(1, 0));
    }

    #[test]
    fn alpha_squared_matches_enclosure() {
        for (pre, per) in [(vec![], vec![1]), (vec![], vec![2]), (vec![3], vec![1]), (vec![1, 4], vec![2, 3]), (vec![2, 1, 5], vec![1, 1, 4])] {
            let ctx = CfContext::periodic(pre, per).unwrap();
            let (u, v) = ctx.alpha_squared().unwrap();
            let a = ctx.alpha_enclosure(200).unwrap();
            let lhs = &a * &a;
            let rhs = &RatInterval::point(u) + &a.scale(&v);
            let diff = &lhs - &rhs;
            assert!(diff.contains_zero());
            assert!(diff.width_le_bits(180));
        }
    }
}
