//! Piecewise-constant roof functions over the rotation `x ↦ x + α`.
//!
//! Jumps follow the convention `d(ξ) = f(ξ⁻) − f(ξ⁺)` and roofs are
//! right-continuous, so `vᵢ₊₁ = vᵢ − dᵢ₊₁` and the point `ξᵢ` itself carries
//! the value `vᵢ`.

pub mod coboundary;
pub mod presets;
mod props;

pub use props::{
    brute_force_p1, EigenReport, EquivalenceStructure, P1Verdict, P2Verdict, WeakMixing,
};

use crate::error::{Error, Result};
use crate::symreal::{Basis, SymReal};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::collections::HashMap;
use std::sync::Arc;

/// A right-continuous step function on the circle with `p ≥ 2` jumps.
#[derive(Debug, Clone)]
pub struct RoofPC {
    basis: Arc<Basis>,
    xi: Vec<SymReal>,
    d: Vec<SymReal>,
    v: Vec<SymReal>,
    xi_f64: Vec<f64>,
    v_f64: Vec<f64>,
    min_index: usize,
    max_index: usize,
    var_f64: f64,
    integral: std::result::Result<SymReal, Error>,
}

/// One point `ξᵢ − jα` of the discontinuity multiset of `f⁽ⁿ⁾`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityPoint {
    pub point: SymReal,
    pub i: usize,
    pub j: u64,
}

/// Coincident discontinuity points with the total jump of `f⁽ⁿ⁾` there.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpCluster {
    pub point: SymReal,
    pub members: Vec<(usize, u64)>,
    pub jump: SymReal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityAudit {
    pub n: u64,
    pub multiset_size: usize,
    pub clusters: Vec<JumpCluster>,
    /// Points where coincident jumps cancel exactly.
    pub cancelled: Vec<SymReal>,
}

impl DiscontinuityAudit {
    /// Number of points where `f⁽ⁿ⁾` is genuinely discontinuous.
    pub fn genuine(&self) -> usize {
        self.clusters.len() - self.cancelled.len()
    }
}

/// The residual `∫f − a − Σ dᵢξᵢ` and its integer coordinates over the jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralIdentity {
    pub residual: SymReal,
    pub coefficients: Option<Vec<BigInt>>,
}

impl RoofPC {
    /// Builds the roof from sorted discontinuities, jumps and the value on
    /// `[ξ₁, ξ₂)`. Discontinuities are reduced to `[0, 1)` first.
    pub fn new(basis: Arc<Basis>, xi: Vec<SymReal>, d: Vec<SymReal>, v1: SymReal) -> Result<Self> {
        let p = xi.len();
        if p < 2 {
            return Err(Error::InvalidRoof(format!("need at least two discontinuities, got {p}")));
        }
        if d.len() != p {
            return Err(Error::InvalidRoof(format!("{p} discontinuities but {} jumps", d.len())));
        }
        let xi = xi.iter().map(|x| basis.circle(x)).collect::<Result<Vec<_>>>()?;
        for w in xi.windows(2) {
            if basis.sign(&(&w[1] - &w[0]))? <= 0 {
                return Err(Error::InvalidRoof("discontinuities must be strictly increasing in [0,1)".into()));
            }
        }
        if let Some(i) = d.iter().position(|x| x.is_zero()) {
            return Err(Error::InvalidRoof(format!("jump d{} is zero", i + 1)));
        }
        let sum = d.iter().fold(SymReal::zero(), |a, x| &a + x);
        if !sum.is_zero() {
            return Err(Error::InvalidRoof(format!(
                "jumps must sum to zero, got {}",
                sum.display(&basis)
            )));
        }
        let mut v = vec![v1];
        for i in 1..p {
            let next = &v[i - 1] - &d[i];
            v.push(next);
        }
        for (i, x) in v.iter().enumerate() {
            if basis.sign(x)? <= 0 {
                return Err(Error::InvalidRoof(format!(
                    "value v{} = {} is not positive",
                    i + 1,
                    x.display(&basis)
                )));
            }
        }
        let mut min_index = 0;
        let mut max_index = 0;
        for i in 1..p {
            if basis.cmp(&v[i], &v[min_index])?.is_lt() {
                min_index = i;
            }
            if basis.cmp(&v[i], &v[max_index])?.is_gt() {
                max_index = i;
            }
        }
        let var_f64 = d.iter().map(|x| basis.to_f64(x).abs()).sum();
        let xi_f64 = xi.iter().map(|x| basis.to_f64(x)).collect();
        let v_f64 = v.iter().map(|x| basis.to_f64(x)).collect();
        let mut roof = Self {
            basis,
            xi,
            d,
            v,
            xi_f64,
            v_f64,
            min_index,
            max_index,
            var_f64,
            integral: Ok(SymReal::zero()),
        };
        roof.integral = roof.compute_integral();
        Ok(roof)
    }

    fn compute_integral(&self) -> Result<SymReal> {
        let p = self.p();
        let mut acc = SymReal::zero();
        for i in 0..p {
            let len = if i + 1 < p {
                &self.xi[i + 1] - &self.xi[i]
            } else {
                (&self.xi[0] - &self.xi[i]).add_rational(&BigRational::one())
            };
            acc = &acc + &self.basis.mul(&self.v[i], &len)?;
        }
        Ok(acc)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn p(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &[SymReal] {
        &self.xi
    }

    pub fn xi_f64(&self) -> &[f64] {
        &self.xi_f64
    }

    pub fn jumps(&self) -> &[SymReal] {
        &self.d
    }

    pub fn jumps_f64(&self) -> Vec<f64> {
        self.d.iter().map(|x| self.basis.to_f64(x)).collect()
    }

    /// `vᵢ`, the value on `[ξᵢ, ξᵢ₊₁)`.
    pub fn values(&self) -> &[SymReal] {
        &self.v
    }

    pub fn values_f64(&self) -> &[f64] {
        &self.v_f64
    }

    /// `a = min f`.
    pub fn min_value(&self) -> &SymReal {
        &self.v[self.min_index]
    }

    pub fn max_value(&self) -> &SymReal {
        &self.v[self.max_index]
    }

    /// `Var f = Σ|dᵢ|` as an exact value.
    pub fn variation(&self) -> Result<SymReal> {
        self.d
            .iter()
            .try_fold(SymReal::zero(), |acc, x| Ok(&acc + &self.basis.abs(x)?))
    }

    pub fn variation_f64(&self) -> f64 {
        self.var_f64
    }

    /// `c_f = ∫f`; fails if a length-value product is not representable.
    pub fn integral(&self) -> Result<&SymReal> {
        self.integral.as_ref().map_err(Clone::clone)
    }

    /// Checks that `∫f − a − Σ dᵢξᵢ` is an integer combination of the jumps.
    pub fn integral_identity(&self) -> Result<IntegralIdentity> {
        let mut residual = self.integral()? - self.min_value();
        for (d, x) in self.d.iter().zip(&self.xi) {
            residual = &residual - &self.basis.mul(d, x)?;
        }
        let coefficients = self.basis.integer_span(&self.d, &residual);
        Ok(IntegralIdentity {
            residual,
            coefficients,
        })
    }

    /// Index `i` with `x ∈ [ξᵢ, ξᵢ₊₁)` (cyclically); `x` need not be reduced.
    pub fn locate(&self, x: &SymReal) -> Result<usize> {
        let y = self.basis.circle(x)?;
        let (yf, err) = self.basis.approx(&y);
        let p = self.p();
        // Fast path: f64 comparison with a margin.
        let margin = 4.0 * err + 1e-13;
        if self.xi_f64.iter().all(|&z| (z - yf).abs() > margin) {
            let k = self.xi_f64.partition_point(|&z| z <= yf);
            return Ok(if k == 0 { p - 1 } else { k - 1 });
        }
        let mut k = 0;
        while k < p && self.basis.cmp(&self.xi[k], &y)?.is_le() {
            k += 1;
        }
        Ok(if k == 0 { p - 1 } else { k - 1 })
    }

    pub fn value_at(&self, x: &SymReal) -> Result<&SymReal> {
        Ok(&self.v[self.locate(x)?])
    }

    /// `f(x)` for a float point, using the stored breakpoints.
    pub fn value_at_f64(&self, x: f64) -> f64 {
        let y = x - x.floor();
        let k = self.xi_f64.partition_point(|&z| z <= y);
        self.v_f64[if k == 0 { self.p() - 1 } else { k - 1 }]
    }

    /// `x + kα`, unreduced.
    pub fn rotate(&self, x: &SymReal, k: i64) -> SymReal {
        let mut c = x.dense(x.len().max(2));
        c[crate::symreal::ALPHA] += BigRational::from_integer(k.into());
        SymReal::from_coords(c)
    }

    /// Visit counts of `x, x+α, …, x+(n−1)α` in each interval `[ξᵢ, ξᵢ₊₁)`.
    pub fn visit_counts(&self, x: &SymReal, n: u64) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.p()];
        let mut y = x.clone();
        for _ in 0..n {
            counts[self.locate(&y)?] += 1;
            y = self.rotate(&y, 1);
        }
        Ok(counts)
    }

    /// `Σ countsᵢ·vᵢ`.
    pub fn combine_values(&self, counts: &[u64]) -> SymReal {
        let k: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
        SymReal::combination_big(&self.v, &k)
    }

    /// The Birkhoff sum `f⁽ⁿ⁾(x)`, with `f⁽⁰⁾ = 0` and
    /// `f⁽⁻ⁿ⁾(x) = −f⁽ⁿ⁾(x − nα)`.
    pub fn birkhoff(&self, x: &SymReal, n: i64) -> Result<SymReal> {
        match n {
            0 => Ok(SymReal::zero()),
            n if n > 0 => Ok(self.combine_values(&self.visit_counts(x, n as u64)?)),
            n => Ok(-&self.birkhoff(&self.rotate(x, n), -n)?),
        }
    }

    /// `#{0 ≤ j < n : ξᵢ − jα ∈ (y, x]}` per `i`, for the circle arc from
    /// `y` counterclockwise to `x`.
    pub fn arc_counts(&self, x: &SymReal, y: &SymReal, n: u64) -> Result<Vec<u64>> {
        let w = self.basis.circle(&(x - y))?;
        if w.is_zero() {
            return Err(Error::Precondition("x and y coincide on the circle".into()));
        }
        let mut counts = vec![0u64; self.p()];
        for (i, xi) in self.xi.iter().enumerate() {
            let mut z = xi - y;
            for _ in 0..n {
                let u = self.basis.circle(&z)?;
                if !u.is_zero() && self.basis.cmp(&u, &w)?.is_le() {
                    counts[i] += 1;
                }
                z = self.rotate(&z, -1);
            }
        }
        Ok(counts)
    }

    /// `f⁽ⁿ⁾(x) − f⁽ⁿ⁾(y) = −Σ dᵢ·#{j < n : ξᵢ − jα ∈ (y, x]}`.
    pub fn birkhoff_diff(&self, x: &SymReal, y: &SymReal, n: u64) -> Result<SymReal> {
        let counts = self.arc_counts(x, y, n)?;
        let k: Vec<BigInt> = counts.iter().map(|&c| -BigInt::from(c)).collect();
        Ok(SymReal::combination_big(&self.d, &k))
    }

    /// The multiset `{ξᵢ − jα : 1 ≤ i ≤ p, 0 ≤ j < n}`, reduced to `[0, 1)`.
    pub fn discontinuities(&self, n: u64) -> Result<Vec<DiscontinuityPoint>> {
        let mut out = Vec::with_capacity(self.p() * n as usize);
        for (i, xi) in self.xi.iter().enumerate() {
            for j in 0..n {
                out.push(DiscontinuityPoint {
                    point: self.basis.circle(&self.rotate(xi, -(j as i64)))?,
                    i,
                    j,
                });
            }
        }
        Ok(out)
    }

    /// Groups coincident discontinuities of `f⁽ⁿ⁾` and sums their jumps.
    pub fn discontinuity_audit(&self, n: u64) -> Result<DiscontinuityAudit> {
        let points = self.discontinuities(n)?;
        let mut order: Vec<SymReal> = Vec::new();
        let mut groups: HashMap<SymReal, Vec<(usize, u64)>> = HashMap::new();
        for dp in &points {
            let e = groups.entry(dp.point.clone()).or_default();
            if e.is_empty() {
                order.push(dp.point.clone());
            }
            e.push((dp.i, dp.j));
        }
        let mut clusters = Vec::with_capacity(order.len());
        let mut cancelled = Vec::new();
        for pt in order {
            let members = groups.remove(&pt).unwrap_or_default();
            let jump = members
                .iter()
                .fold(SymReal::zero(), |acc, &(i, _)| &acc + &self.d[i]);
            if jump.is_zero() {
                cancelled.push(pt.clone());
            }
            clusters.push(JumpCluster {
                point: pt,
                members,
                jump,
            });
        }
        Ok(DiscontinuityAudit {
            n,
            multiset_size: points.len(),
            clusters,
            cancelled,
        })
    }

    pub fn equivalence_structure(&self) -> Result<EquivalenceStructure> {
        props::equivalence_structure(self)
    }

    /// Decides (P1); on failure returns a violating integer relation.
    pub fn check_p1(&self) -> Result<P1Verdict> {
        props::check_p1(self)
    }

    /// Decides (P2) through `a ∉ Σ(ℚ + ℚα)dᵢ`.
    pub fn check_p2(&self) -> Result<P2Verdict> {
        props::check_p2(self)
    }

    /// Solvability of `ψ(Tx)/ψ(x) = exp(2πi r f(x))` by the class-sum
    /// criterion.
    pub fn eigenvalue_criterion(&self, r: &SymReal) -> Result<EigenReport> {
        props::eigenvalue_criterion(self, r)
    }

    pub fn weak_mixing_verdict(&self) -> Result<WeakMixing> {
        props::weak_mixing_verdict(self)
    }

    /// Whether `0 ≤ s < f(x)`.
    pub fn under_graph(&self, x: &SymReal, s: &SymReal) -> Result<bool> {
        Ok(self.basis.sign(s)? >= 0 && self.basis.cmp(s, self.value_at(x)?)?.is_lt())
    }

    /// The roof `g(z) = f(−z − α)`, made right-continuous. Backward sums of
    /// `f` are forward sums of `g`: `f⁽⁻ⁿ⁾(x) = −g⁽ⁿ⁾(−x)` away from the
    /// discontinuities.
    pub fn reflected(&self) -> Result<RoofPC> {
        let b = &self.basis;
        let p = self.p();
        let mut pts: Vec<(SymReal, usize)> = Vec::with_capacity(p);
        for (i, xi) in self.xi.iter().enumerate() {
            pts.push((b.circle(&self.rotate(&-xi, -1))?, i));
        }
        let mut err = None;
        pts.sort_by(|x, y| {
            b.cmp(&x.0, &y.0).unwrap_or_else(|e| {
                err = Some(e);
                std::cmp::Ordering::Equal
            })
        });
        if let Some(e) = err {
            return Err(e);
        }
        let xi = pts.iter().map(|(x, _)| x.clone()).collect();
        let d = pts.iter().map(|&(_, i)| -&self.d[i]).collect();
        // Just right of −ξᵢ − α, g takes f's value just left of ξᵢ.
        let first = pts[0].1;
        let v1 = self.v[(first + p - 1) % p].clone();
        RoofPC::new(self.basis.clone(), xi, d, v1)
    }

    /// `Σ kᵢ·dᵢ`.
    pub fn int_combination(&self, counts: &[i64]) -> SymReal {
        SymReal::combination(&self.d, counts)
    }
}
