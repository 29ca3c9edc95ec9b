//! The special flow `T^f` and its diagnostics.
//!
//! A phase point is `(x, s)` with `0 ≤ s < f(x)`; the flow moves `s` up at
//! unit speed and glues `(x, f(x))` to `(x + α, 0)`. Exact routines carry
//! heights as [`SymReal`]s; the Monte Carlo routines work in `f64`.

use crate::error::{Error, Result};
use crate::roof::RoofPC;
use crate::symreal::SymReal;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Samples drawn per independently seeded RNG stream.
pub const SHARD: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpecialFlowPoint {
    pub x: SymReal,
    pub s: SymReal,
}

impl SpecialFlowPoint {
    /// Validates `0 ≤ s < f(x)` and reduces `x` to `[0, 1)`.
    pub fn new(f: &RoofPC, x: SymReal, s: SymReal) -> Result<Self> {
        let x = f.basis().circle(&x)?;
        if !f.under_graph(&x, &s)? {
            return Err(Error::Precondition("phase point is not under the roof".into()));
        }
        Ok(Self { x, s })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatPoint {
    pub x: f64,
    pub s: f64,
}

/// `T^f_t(x, s) = (x + nα, s + t − f⁽ⁿ⁾(x))` with
/// `f⁽ⁿ⁾(x) ≤ s + t < f⁽ⁿ⁺¹⁾(x)`, exactly.
pub fn flow_map(f: &RoofPC, pt: &SpecialFlowPoint, t: &SymReal) -> Result<SpecialFlowPoint> {
    let b = f.basis();
    let mut h = &pt.s + t;
    let mut x = pt.x.clone();
    if b.sign(&h)? >= 0 {
        loop {
            let v = f.value_at(&x)?;
            if b.cmp(&h, v)?.is_lt() {
                break;
            }
            h = &h - v;
            x = f.rotate(&x, 1);
        }
    } else {
        loop {
            x = f.rotate(&x, -1);
            h = &h + f.value_at(&x)?;
            if b.sign(&h)? >= 0 {
                break;
            }
        }
    }
    Ok(SpecialFlowPoint {
        x: b.circle(&x)?,
        s: h,
    })
}

/// Floating-point counterpart of [`flow_map`].
pub fn flow_map_f64(f: &RoofPC, pt: FloatPoint, t: f64) -> FloatPoint {
    let alpha = f.basis().ctx().alpha_f64();
    let mut h = pt.s + t;
    let mut x = pt.x;
    if h >= 0.0 {
        loop {
            let v = f.value_at_f64(x);
            if h < v {
                break;
            }
            h -= v;
            x = (x + alpha).rem_euclid(1.0);
        }
    } else {
        while h < 0.0 {
            x = (x - alpha).rem_euclid(1.0);
            h += f.value_at_f64(x);
        }
    }
    FloatPoint { x, s: h }
}

/// `[x0, x1) × [s0, s1)` with the arc running counterclockwise from `x0`;
/// `0 < x1 − x0 ≤ 1`, so a wrapping arc is written with `x1 > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    pub x0: SymReal,
    pub x1: SymReal,
    pub s0: SymReal,
    pub s1: SymReal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RectF64 {
    x0: f64,
    len: f64,
    s0: f64,
    s1: f64,
}

impl RectF64 {
    fn contains(&self, p: FloatPoint) -> bool {
        (p.x - self.x0).rem_euclid(1.0) < self.len && p.s >= self.s0 && p.s < self.s1
    }
}

impl Rect {
    pub fn new(x0: SymReal, x1: SymReal, s0: SymReal, s1: SymReal) -> Self {
        Self { x0, x1, s0, s1 }
    }

    fn to_f64(&self, f: &RoofPC) -> RectF64 {
        let b = f.basis();
        let x0 = b.to_f64(&self.x0);
        RectF64 {
            x0: x0.rem_euclid(1.0),
            len: b.to_f64(&self.x1) - x0,
            s0: b.to_f64(&self.s0),
            s1: b.to_f64(&self.s1),
        }
    }

    /// Whether the point lies in the rectangle, exactly.
    pub fn contains(&self, f: &RoofPC, p: &SpecialFlowPoint) -> Result<bool> {
        let b = f.basis();
        let len = &self.x1 - &self.x0;
        let u = b.circle(&(&p.x - &self.x0))?;
        Ok(b.cmp(&u, &len)?.is_lt() && b.cmp(&p.s, &self.s0)?.is_ge() && b.cmp(&p.s, &self.s1)?.is_lt())
    }

    /// Checks the rectangle is nondegenerate and lies under the graph.
    pub fn validate(&self, f: &RoofPC) -> Result<()> {
        let b = f.basis();
        let len = &self.x1 - &self.x0;
        if b.sign(&len)? <= 0 || b.cmp(&len, &SymReal::int(1))?.is_gt() {
            return Err(Error::Precondition("rectangle arc length must lie in (0, 1]".into()));
        }
        if b.sign(&self.s0)? < 0 || b.cmp(&self.s0, &self.s1)?.is_ge() {
            return Err(Error::Precondition("rectangle heights must satisfy 0 ≤ s0 < s1".into()));
        }
        let mut inf = f.value_at(&self.x0)?.clone();
        for (xi, v) in f.xi().iter().zip(f.values()) {
            let u = b.circle(&(xi - &self.x0))?;
            if !u.is_zero() && b.cmp(&u, &len)?.is_lt() && b.cmp(v, &inf)?.is_lt() {
                inf = v.clone();
            }
        }
        if b.cmp(&self.s1, &inf)?.is_gt() {
            return Err(Error::Precondition("rectangle protrudes above the roof".into()));
        }
        Ok(())
    }

    pub fn area(&self, f: &RoofPC) -> Result<SymReal> {
        f.basis().mul(&(&self.x1 - &self.x0), &(&self.s1 - &self.s0))
    }
}

/// The full phase space as one rectangle per continuity interval.
pub fn full_space(f: &RoofPC) -> Vec<Rect> {
    let p = f.p();
    (0..p)
        .map(|i| {
            let x1 = if i + 1 < p {
                f.xi()[i + 1].clone()
            } else {
                f.xi()[0].add_rational(&BigRational::from_integer(1.into()))
            };
            Rect::new(f.xi()[i].clone(), x1, SymReal::zero(), f.values()[i].clone())
        })
        .collect()
}

/// `λ^f(A) / ∫f` as an exact pair together with its value.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRatio {
    pub area: SymReal,
    pub total: SymReal,
    pub value: f64,
}

/// Normalized measure of a union of pairwise disjoint rectangles.
pub fn phase_measure(f: &RoofPC, region: &[Rect]) -> Result<MeasureRatio> {
    let mut area = SymReal::zero();
    for r in region {
        r.validate(f)?;
        area = &area + &r.area(f)?;
    }
    let total = f.integral()?.clone();
    let b = f.basis();
    let value = if area == total {
        1.0
    } else {
        b.to_f64(&area) / b.to_f64(&total)
    };
    Ok(MeasureRatio { area, total, value })
}

/// Monte Carlo estimate of a probability with its 95% binomial radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub radius: f64,
    pub n_samples: usize,
}

impl Estimate {
    fn from_hits(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            estimate: p,
            radius: 1.96 * (p * (1.0 - p) / n as f64).sqrt(),
            n_samples: n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub t: f64,
    pub seed: u64,
    pub estimate: Estimate,
}

impl CorrelationEstimate {
    pub fn csv(&self) -> String {
        format!(
            "t,estimate,radius,n_samples,seed\n{},{},{},{},{}\n",
            self.t, self.estimate.estimate, self.estimate.radius, self.estimate.n_samples, self.seed
        )
    }
}

/// Uniform samples of the phase space by rejection from `[0,1) × [0, max f)`,
/// drawn shard by shard from independent ChaCha streams.
pub fn sample_phase_space(f: &RoofPC, n: usize, seed: u64) -> Vec<FloatPoint> {
    let top = f.values_f64().iter().copied().fold(0.0, f64::max);
    let mut out = Vec::with_capacity(n);
    let mut shard = 0u64;
    while out.len() < n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        let quota = SHARD.min(n - out.len());
        let mut got = 0;
        while got < quota {
            let x: f64 = rng.gen();
            let s: f64 = rng.gen::<f64>() * top;
            if s < f.value_at_f64(x) {
                out.push(FloatPoint { x, s });
                got += 1;
            }
        }
        shard += 1;
    }
    out
}

fn region_f64(f: &RoofPC, region: &[Rect]) -> Result<Vec<RectF64>> {
    region
        .iter()
        .map(|r| {
            r.validate(f)?;
            Ok(r.to_f64(f))
        })
        .collect()
}

/// Estimate of `λ^f(T^f_{−t}A ∩ B)/∫f`: the fraction of uniform samples in
/// `B` whose time-`t` image lies in `A`.
pub fn correlation(
    f: &RoofPC,
    a: &[Rect],
    b: &[Rect],
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<CorrelationEstimate> {
    if n_samples < 1000 {
        return Err(Error::Precondition("correlation needs at least 1000 samples".into()));
    }
    let (ra, rb) = (region_f64(f, a)?, region_f64(f, b)?);
    let pts = sample_phase_space(f, n_samples, seed);
    let hits = pts
        .iter()
        .filter(|&&p| rb.iter().any(|r| r.contains(p)))
        .filter(|&&p| {
            let q = flow_map_f64(f, p, t);
            ra.iter().any(|r| r.contains(q))
        })
        .count();
    Ok(CorrelationEstimate {
        t,
        seed,
        estimate: Estimate::from_hits(hits, n_samples),
    })
}

/// Fraction of flowed samples landing in each rectangle.
pub fn occupancy(f: &RoofPC, rects: &[Rect], t: f64, n_samples: usize, seed: u64) -> Result<Vec<Estimate>> {
    let rs = region_f64(f, rects)?;
    let mut hits = vec![0usize; rs.len()];
    for p in sample_phase_space(f, n_samples, seed) {
        let q = flow_map_f64(f, p, t);
        for (h, r) in hits.iter_mut().zip(&rs) {
            if r.contains(q) {
                *h += 1;
            }
        }
    }
    Ok(hits.into_iter().map(|h| Estimate::from_hits(h, n_samples)).collect())
}

/// `N_i(x_k) = #{0 ≤ j < q : ξᵢ − jα ∈ (0, k/G]}` for every grid point
/// `x_k = k/G`, flattened as `counts[k·p + i]`.
pub struct GridCounts {
    pub q: u64,
    pub grid: usize,
    pub p: usize,
    pub counts: Vec<u32>,
}

impl GridCounts {
    pub fn at(&self, k: usize) -> &[u32] {
        &self.counts[k * self.p..(k + 1) * self.p]
    }

    fn from_buckets(q: u64, grid: usize, buckets: Vec<Vec<u32>>) -> Self {
        let p = buckets.len();
        let mut counts = vec![0u32; grid * p];
        for (i, hist) in buckets.iter().enumerate() {
            let mut acc = 0;
            for k in 0..grid {
                acc += hist[k];
                counts[k * p + i] = acc;
            }
        }
        Self { q, grid, p, counts }
    }

    /// Exact counts: each point is placed by `⌈G·frac(ξᵢ − jα)⌉` computed
    /// with certified comparisons.
    pub fn exact(f: &RoofPC, q: u64, grid: usize) -> Result<Self> {
        let b = f.basis();
        let g = BigRational::from_integer(BigInt::from(grid));
        let mut buckets = vec![vec![0u32; grid + 1]; f.p()];
        for (i, xi) in f.xi().iter().enumerate() {
            let mut z = xi.clone();
            for _ in 0..q {
                let y = b.circle(&z)?;
                if !y.is_zero() {
                    let gy = y.scale(&g);
                    let fl = b.floor(&gy)?;
                    let exact_hit = gy.as_rational().is_some_and(|r| r.is_integer());
                    let k = if exact_hit { fl } else { fl + 1 };
                    let k = k.to_usize().expect("bucket index");
                    if k <= grid {
                        buckets[i][k] += 1;
                    }
                }
                z = f.rotate(&z, -1);
            }
        }
        Ok(Self::from_buckets(q, grid, buckets))
    }

    /// The same counts from `f64` arithmetic, as an independent path.
    pub fn float(f: &RoofPC, q: u64, grid: usize) -> Self {
        let alpha = f.basis().ctx().alpha_f64();
        let mut buckets = vec![vec![0u32; grid + 1]; f.p()];
        for (i, &xi) in f.xi_f64().iter().enumerate() {
            for j in 0..q {
                let y = (xi - (j as f64) * alpha).rem_euclid(1.0);
                if y > 0.0 {
                    let k = (y * grid as f64).ceil() as usize;
                    if k <= grid {
                        buckets[i][k] += 1;
                    }
                }
            }
        }
        Self::from_buckets(q, grid, buckets)
    }
}

/// `f⁽q⁾(x_k) − q·c_f` for every grid point, exact and cached per distinct
/// count vector.
pub struct CenteredSums {
    pub q: u64,
    /// `f⁽q⁾(0) − q·c_f`.
    pub base: SymReal,
    /// Distinct count vectors with their values and multiplicities.
    pub classes: Vec<(Vec<u32>, SymReal, usize)>,
}

pub fn centered_sums(f: &RoofPC, q: u64, grid: usize) -> Result<CenteredSums> {
    let c_f = f.integral()?;
    let at0 = f.birkhoff(&SymReal::zero(), q as i64)?;
    let base = &at0 - &c_f.scale(&BigRational::from_integer(BigInt::from(q)));
    let gc = GridCounts::exact(f, q, grid)?;
    let mut index: HashMap<&[u32], usize> = HashMap::new();
    let mut classes: Vec<(Vec<u32>, SymReal, usize)> = Vec::new();
    for k in 0..grid {
        let c = gc.at(k);
        match index.get(c) {
            Some(&m) => classes[m].2 += 1,
            None => {
                let neg: Vec<BigInt> = c.iter().map(|&n| -BigInt::from(n)).collect();
                let v = &base + &SymReal::combination_big(f.jumps(), &neg);
                index.insert(c, classes.len());
                classes.push((c.to_vec(), v, 1));
            }
        }
    }
    Ok(CenteredSums { q, base, classes })
}

/// One atom of the distribution of `f⁽qₙ⁾ − qₙc_f` over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub value: SymReal,
    pub value_f64: f64,
    pub mass: BigRational,
    /// `kᵢ ∈ [−2, 2]` with `value = base + Σ kᵢdᵢ`, when such exist.
    pub offset: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub n: usize,
    pub q_n: u64,
    pub grid: usize,
    /// `qₙ·c_f`.
    pub t_n: f64,
    /// `f⁽qₙ⁾(0) − qₙc_f`.
    pub gamma: SymReal,
    /// Atoms by decreasing mass.
    pub atoms: Vec<Atom>,
    /// `|D|` for `D = Σ dᵢ·{−2, …, 2}`.
    pub d_size: usize,
    pub all_in_predicted: bool,
    /// Largest atom mass.
    pub u: f64,
}

impl RigidityReport {
    pub fn heaviest(&self) -> &Atom {
        &self.atoms[0]
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("n,q_n,atom_value,mass\n");
        for a in &self.atoms {
            let _ = writeln!(s, "{},{},{},{}", self.n, self.q_n, a.value_f64, a.mass);
        }
        s
    }
}

/// The finite set `D = Σ dᵢ·{−2, …, 2}`.
pub fn offset_set(f: &RoofPC) -> Vec<SymReal> {
    let p = f.p() as u32;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for code in 0..5u64.pow(p) {
        let mut c = code;
        let k: Vec<i64> = (0..p)
            .map(|_| {
                let r = (c % 5) as i64 - 2;
                c /= 5;
                r
            })
            .collect();
        let v = f.int_combination(&k);
        if seen.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

pub fn qn_distribution(f: &RoofPC, n: usize, grid: usize) -> Result<RigidityReport> {
    if grid < 1000 {
        return Err(Error::Precondition("grid must have at least 1000 points".into()));
    }
    let b = f.basis();
    let q = b.ctx().q_u64(n)?;
    let cs = centered_sums(f, q, grid)?;
    let mut merged: HashMap<SymReal, (usize, Option<Vec<i64>>)> = HashMap::new();
    let mut order = Vec::new();
    for (counts, v, mult) in &cs.classes {
        let lo = *counts.iter().min().unwrap_or(&0) as i64;
        let hi = *counts.iter().max().unwrap_or(&0) as i64;
        // Σdᵢ = 0, so −ΣdᵢNᵢ = Σ(m − Nᵢ)dᵢ for any integer m.
        let offset = (hi - lo <= 4).then(|| counts.iter().map(|&c| lo + 2 - c as i64).collect());
        let e = merged.entry(v.clone()).or_insert_with(|| {
            order.push(v.clone());
            (0, None)
        });
        e.0 += mult;
        if e.1.is_none() {
            e.1 = offset;
        }
    }
    let mut atoms: Vec<Atom> = order
        .into_iter()
        .map(|v| {
            let (count, offset) = merged.remove(&v).unwrap_or((0, None));
            Atom {
                value_f64: b.to_f64(&v),
                value: v,
                mass: BigRational::new(count.into(), grid.into()),
                offset,
            }
        })
        .collect();
    atoms.sort_by(|x, y| {
        y.mass
            .cmp(&x.mass)
            .then(x.value_f64.partial_cmp(&y.value_f64).unwrap_or(std::cmp::Ordering::Equal))
    });
    let all_in_predicted = atoms.iter().all(|a| {
        a.offset
            .as_ref()
            .is_some_and(|k| &cs.base + &f.int_combination(k) == a.value)
    });
    let u = atoms[0].mass.to_f64().unwrap_or(0.0);
    Ok(RigidityReport {
        n,
        q_n: q,
        grid,
        t_n: q as f64 * b.to_f64(f.integral()?),
        gamma: cs.base,
        atoms,
        d_size: offset_set(f).len(),
        all_in_predicted,
        u,
    })
}

/// One row of the Denjoy–Koksma audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DkRow {
    pub n: usize,
    pub q_n: u64,
    /// Exact `max_x |f⁽qₙ⁾(x) − qₙ∫f|` over the grid.
    pub max_dev: SymReal,
    pub max_dev_f64: f64,
    /// The same maximum from the floating-point path.
    pub float_max_dev: f64,
    /// Largest per-point gap between the exact and float deviations.
    pub float_gap: f64,
    pub bound: SymReal,
    pub holds: bool,
}

pub fn dk_audit(f: &RoofPC, n_max: usize, grid: usize) -> Result<Vec<DkRow>> {
    let b = f.basis();
    let var = f.variation()?;
    let c_f = b.to_f64(f.integral()?);
    let alpha = b.ctx().alpha_f64();
    let d_f = f.jumps_f64();
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let q = b.ctx().q_u64(n)?;
        if rows.iter().any(|r: &DkRow| r.q_n == q) {
            continue;
        }
        let cs = centered_sums(f, q, grid)?;
        let mut max_dev = SymReal::zero();
        let mut holds = true;
        let mut exact_by_counts: HashMap<Vec<u32>, f64> = HashMap::new();
        for (counts, v, _) in &cs.classes {
            let dev = b.abs(v)?;
            if b.cmp(&dev, &var)?.is_gt() {
                holds = false;
            }
            if b.cmp(&dev, &max_dev)?.is_gt() {
                max_dev = dev;
            }
            exact_by_counts.insert(counts.clone(), b.to_f64(v));
        }
        // Float path: visit counts at 0 and arc counts both from f64.
        let mut visits = vec![0u64; f.p()];
        for j in 0..q {
            let y = (j as f64 * alpha).rem_euclid(1.0);
            let k = f.xi_f64().partition_point(|&z| z <= y);
            visits[if k == 0 { f.p() - 1 } else { k - 1 }] += 1;
        }
        let base: f64 = visits
            .iter()
            .zip(f.values_f64())
            .map(|(&m, &v)| m as f64 * (v - c_f))
            .sum();
        let fc = GridCounts::float(f, q, grid);
        let ec = GridCounts::exact(f, q, grid)?;
        let mut float_max: f64 = 0.0;
        let mut gap: f64 = 0.0;
        for k in 0..grid {
            let fv = base - fc.at(k).iter().zip(&d_f).map(|(&c, d)| c as f64 * d).sum::<f64>();
            float_max = float_max.max(fv.abs());
            gap = gap.max((fv - exact_by_counts[ec.at(k)]).abs());
        }
        rows.push(DkRow {
            n,
            q_n: q,
            max_dev_f64: b.to_f64(&max_dev),
            max_dev,
            float_max_dev: float_max,
            float_gap: gap,
            bound: var.clone(),
            holds,
        });
    }
    Ok(rows)
}

/// Exact check of `f⁽ᵐ⁺ⁿ⁾(x) = f⁽ᵐ⁾(x) + f⁽ⁿ⁾(x + mα)`.
pub fn cocycle_holds(f: &RoofPC, x: &SymReal, m: i64, n: i64) -> Result<bool> {
    let lhs = f.birkhoff(x, m + n)?;
    let rhs = &f.birkhoff(x, m)? + &f.birkhoff(&f.rotate(x, m), n)?;
    Ok(lhs == rhs)
}
