//! The shadowing lemma for roofs with (P1): explicit constants, witness
//! windows on which `f⁽ⁿ⁾(x) − f⁽ⁿ⁾(y)` is a constant nonzero `ρ`, and an
//! empirical check of the resulting Ratner-type property of the flow.

pub mod fixed;

use crate::error::{Error, Result};
use crate::roof::RoofPC;
use crate::symreal::{SymReal, Target};
use fixed::{fix64, hits};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

/// Default range of the Diophantine scan behind `c`.
pub const DEFAULT_J_MAX: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RatnerConstants {
    pub c: BigRational,
    pub big_c: u64,
    pub p: usize,
    pub h: u64,
    /// `R = 2/c⁵ + 1`.
    pub r: BigRational,
    /// `⌊R⌋`, the coefficient bound of `V`.
    pub r_floor: u64,
    pub kappa: BigRational,
    /// `δ(N)·N`, so that `δ(N) = delta_unit / N`.
    pub delta_unit: BigRational,
    /// Pairs `(i, i')` with `ξᵢ − ξᵢ′ ∈ (ℚ+ℚα)∖(ℤ+ℤα)` and their `(h, m₂)`.
    pub h_pairs: Vec<(usize, usize, u64, BigInt)>,
}

impl RatnerConstants {
    /// `δ(N) = c⁷/(2pH²(1 + c⁵)N)`.
    pub fn delta(&self, n: u64) -> BigRational {
        &self.delta_unit / BigRational::from_integer(n.into())
    }

    /// Integer coefficients `r` with `|rᵢ| ≤ ⌊R⌋` and `x = Σ rᵢdᵢ`, if any.
    pub fn in_v(&self, f: &RoofPC, x: &SymReal) -> Result<Option<Vec<BigInt>>> {
        let b = f.basis();
        let Some(r0) = b.integer_span(f.jumps(), x) else {
            return Ok(None);
        };
        let bound = BigInt::from(self.r_floor);
        let fits = |r: &[BigInt]| r.iter().all(|c| c.abs() <= bound);
        let ker = b.relation_lattice(f.jumps());
        match ker.len() {
            0 => Ok(fits(&r0).then_some(r0)),
            1 => {
                // r0 + t·k stays in the box for t in an intersection of ranges.
                let k = &ker[0];
                let mut lo: Option<BigInt> = None;
                let mut hi: Option<BigInt> = None;
                for (c, kc) in r0.iter().zip(k) {
                    if kc.is_zero() {
                        if c.abs() > bound {
                            return Ok(None);
                        }
                        continue;
                    }
                    let (a, z) = ((-&bound - c), (&bound - c));
                    let (t0, t1) = if kc.is_positive() {
                        (a.div_ceil(kc), z.div_floor(kc))
                    } else {
                        (z.div_ceil(kc), a.div_floor(kc))
                    };
                    lo = Some(lo.map_or(t0.clone(), |l| l.max(t0)));
                    hi = Some(hi.map_or(t1.clone(), |h| h.min(t1)));
                }
                match (lo, hi) {
                    (Some(l), Some(h)) if l <= h => {
                        Ok(Some(r0.iter().zip(k).map(|(c, kc)| c + kc * &l).collect()))
                    }
                    _ => Ok(None),
                }
            }
            _ => Err(Error::InsufficientStructure(
                "membership in V with a relation lattice of rank ≥ 2".into(),
            )),
        }
    }

    /// Whether `x ∈ F = V ∖ {0}`.
    pub fn in_f(&self, f: &RoofPC, x: &SymReal) -> Result<bool> {
        Ok(!x.is_zero() && self.in_v(f, x)?.is_some())
    }
}

fn pow(x: &BigRational, k: u32) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * x)
}

/// Computes `c, C, H, R, κ, δ` for a roof satisfying (P1).
pub fn constants(f: &RoofPC, j_max: u64) -> Result<RatnerConstants> {
    let p1 = f.check_p1()?;
    if !p1.holds {
        return Err(Error::Precondition("(P1) fails; the witness set F may contain 0".into()));
    }
    let b = f.basis();
    let ctx = b.ctx();
    let c = ctx.bpq_constant(j_max)?.c;
    let xi = f.xi();
    let mut h = 1u64;
    let mut h_pairs = Vec::new();
    for i in 0..f.p() {
        for k in 0..f.p() {
            if i == k {
                continue;
            }
            let diff = &xi[i] - &xi[k];
            let in_q = b.membership(&diff, Target::QPlusQAlpha)?.member;
            let in_z = b.membership(&diff, Target::ZPlusZAlphaMod1)?.member;
            if in_q && !in_z {
                let (r, s) = (diff.coord(0), diff.coord(1));
                let den = r.denom().lcm(s.denom());
                let m2 = (&s * BigRational::from_integer(den.clone())).to_integer();
                let hh = den.to_u64().ok_or_else(|| Error::Numerical("H overflows".into()))?;
                let mm = m2.abs().to_u64().ok_or_else(|| Error::Numerical("H overflows".into()))?;
                h = h.max(hh).max(mm);
                h_pairs.push((i, k, hh, m2));
            }
        }
    }
    let p = f.p();
    let c5 = pow(&c, 5);
    let two = BigRational::from_integer(2.into());
    let r = &two / &c5 + BigRational::one();
    let r_floor = r.floor().to_integer().to_u64().ok_or_else(|| Error::Numerical("R overflows".into()))?;
    let ph2 = BigRational::from_integer(BigInt::from(p as u64 * h * h));
    let one_c5 = BigRational::one() + &c5;
    let kappa = pow(&c, 10) / (BigRational::from_integer(4.into()) * &ph2 * &one_c5);
    let delta_unit = pow(&c, 7) / (&two * &ph2 * &one_c5);
    Ok(RatnerConstants {
        c,
        big_c: ctx.big_c(),
        p,
        h,
        r,
        r_floor,
        kappa,
        delta_unit,
        h_pairs,
    })
}

/// A maximal run of constant `Δ(n) = f⁽ⁿ⁾(x) − f⁽ⁿ⁾(y)` over `n ∈ [start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: u64,
    pub end: u64,
    pub delta: SymReal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub s: usize,
    pub q_s: u64,
    pub q_s4: u64,
    pub m: u64,
    pub l: u64,
    pub rho: SymReal,
    /// `ρ = Σ rᵢdᵢ` with these coefficients.
    pub rho_coeffs: Vec<i64>,
    /// Discontinuities of `f^(q_{s+4})` in the short arc, per `ξᵢ`.
    pub arc_counts: Vec<u64>,
    /// Longest interval of `n` with `Δ(n) ≠ 0`, as `(start, end)`.
    pub nonzero_window: (u64, u64),
    /// `Δ` over `[q_s, q_{s+4})`.
    pub trace: Vec<Segment>,
    pub kappa_check: bool,
    pub n_check: bool,
    pub v_check: bool,
    pub split_check: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub s: usize,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "L")]
    pub l: u64,
    pub rho_coords: Vec<String>,
    pub rho: f64,
    pub kappa_check: bool,
    #[serde(rename = "N_check")]
    pub n_check: bool,
}

impl WitnessReport {
    pub fn json(&self, f: &RoofPC) -> WitnessJson {
        WitnessJson {
            s: self.s,
            m: self.m,
            l: self.l,
            rho_coords: self.rho.coords().iter().map(|c| c.to_string()).collect(),
            rho: f.basis().to_f64(&self.rho),
            kappa_check: self.kappa_check,
            n_check: self.n_check,
        }
    }

    /// `Δ(n)` read off the trace.
    pub fn delta_at(&self, n: u64) -> Option<&SymReal> {
        self.trace
            .iter()
            .find(|seg| seg.start <= n && n <= seg.end)
            .map(|seg| &seg.delta)
    }
}

/// Largest `s` with `‖x − y‖ < 2/q_s`.
fn scale_index(f: &RoofPC, diff: &SymReal) -> Result<usize> {
    let b = f.basis();
    let ctx = b.ctx();
    let mut s = 0;
    loop {
        let bound = BigRational::new(BigInt::from(2), ctx.q(s + 1)?);
        let below = bound > BigRational::new(1.into(), 2.into()) || b.dist_to_int_lt(diff, &bound)?;
        if !below {
            return Ok(s);
        }
        s += 1;
    }
}

/// Finds `[M, M + L]` with `f⁽ⁿ⁾(x) − f⁽ⁿ⁾(y) = ρ ∈ F` for every `n` in it,
/// scanning `n ∈ [q_s, q_{s+4})`, and checks the lemma's guarantees.
pub fn find_witness(
    f: &RoofPC,
    k: &RatnerConstants,
    x: &SymReal,
    y: &SymReal,
    n: u64,
) -> Result<WitnessReport> {
    let b = f.basis();
    let ctx = b.ctx();
    let diff = x - y;
    let w = b.circle(&diff)?;
    if w.is_zero() {
        return Err(Error::Precondition("x and y coincide on the circle".into()));
    }
    let delta = k.delta(n);
    if !b.dist_to_int_lt(&diff, &delta.clone().min(BigRational::new(1.into(), 2.into())))? {
        return Err(Error::Precondition(format!(
            "‖x − y‖ must be below δ(N) ≈ {:.3e}",
            delta.to_f64().unwrap_or(0.0)
        )));
    }
    let s = scale_index(f, &diff)?;
    let q_s = ctx.q_u64(s)?;
    let q_s4 = ctx.q_u64(s + 4)?;
    // The short arc is (start, start + len]; Δ = sign·Σ dᵢ·countᵢ.
    let half = BigRational::new(1.into(), 2.into());
    let (start, len, sign) = if b.cmp(&w, &SymReal::rational(half))?.is_lt() {
        (y.clone(), w, -1i64)
    } else {
        (x.clone(), (-&w).add_rational(&BigRational::one()), 1i64)
    };
    let alpha_fix = ctx.alpha_fixed64()?;
    let step = alpha_fix.wrapping_neg();
    let start_fix = fix64(b, &start)?;
    let len_fix = fix64(b, &len)?;
    let margin = q_s4.saturating_add(8);
    let mut per_i: Vec<Vec<u64>> = Vec::with_capacity(f.p());
    for xi in f.xi() {
        let xi_fix = fix64(b, xi)?;
        let origin = xi_fix.wrapping_sub(start_fix).wrapping_add(margin);
        let width = len_fix.saturating_add(2 * margin);
        let mut confirmed = Vec::new();
        for j in hits(origin, step, width, q_s4) {
            let u = b.circle(&(&f.rotate(xi, -(j as i64)) - &start))?;
            if !u.is_zero() && b.cmp(&u, &len)?.is_le() {
                confirmed.push(j);
            }
        }
        per_i.push(confirmed);
    }
    let arc_counts: Vec<u64> = per_i.iter().map(|v| v.len() as u64).collect();
    // Δ(n) changes only at n = j + 1 for a hit j.
    let mut events: Vec<(u64, usize)> = per_i
        .iter()
        .enumerate()
        .flat_map(|(i, js)| js.iter().map(move |&j| (j + 1, i)))
        .collect();
    events.sort_unstable();
    let mut counts = vec![0i64; f.p()];
    let mut ev = events.iter().peekable();
    while let Some(&&(at, i)) = ev.peek() {
        if at > q_s {
            break;
        }
        counts[i] += 1;
        ev.next();
    }
    let mut cache: HashMap<Vec<i64>, SymReal> = HashMap::new();
    let mut value = |c: &[i64]| -> SymReal {
        cache
            .entry(c.to_vec())
            .or_insert_with(|| f.int_combination(&c.iter().map(|&v| sign * v).collect::<Vec<_>>()))
            .clone()
    };
    let mut trace: Vec<Segment> = Vec::new();
    let mut seg_counts: Vec<Vec<i64>> = Vec::new();
    let mut cur = q_s;
    loop {
        let next = ev.peek().map_or(q_s4, |e| e.0.min(q_s4));
        if next > cur {
            let d = value(&counts);
            match trace.last_mut() {
                Some(last) if last.delta == d => last.end = next - 1,
                _ => {
                    trace.push(Segment {
                        start: cur,
                        end: next - 1,
                        delta: d,
                    });
                    seg_counts.push(counts.clone());
                }
            }
            cur = next;
        }
        if cur >= q_s4 {
            break;
        }
        while let Some(&&(at, i)) = ev.peek() {
            if at != cur {
                break;
            }
            counts[i] += 1;
            ev.next();
        }
    }
    let best = trace
        .iter()
        .enumerate()
        .filter(|(_, seg)| !seg.delta.is_zero())
        .max_by(|(ia, a), (ib, bb)| (a.end - a.start).cmp(&(bb.end - bb.start)).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::LemmaViolation("Δ vanishes on the whole window".into()))?;
    let run = &trace[best];
    let (m, l) = (run.start, run.end - run.start);
    let rho = run.delta.clone();
    let rho_coeffs: Vec<i64> = seg_counts[best].iter().map(|&c| sign * c).collect();
    // Longest stretch of consecutive nonzero segments.
    let mut nonzero_window = (0, 0);
    let mut best_len = 0;
    let mut open: Option<u64> = None;
    for seg in &trace {
        if seg.delta.is_zero() {
            open = None;
            continue;
        }
        let st = *open.get_or_insert(seg.start);
        if seg.end + 1 - st > best_len {
            best_len = seg.end + 1 - st;
            nonzero_window = (st, seg.end);
        }
    }
    let kappa_check = BigRational::new(l.into(), m.into()) >= k.kappa;
    let n_check = m >= n && l >= n;
    let v_check = arc_counts.iter().all(|&c| c <= k.r_floor);
    let split_check =
        (l as u128 + 1) * (k.r_floor as u128 * f.p() as u128 + 1) >= best_len as u128;
    let rep = WitnessReport {
        s,
        q_s,
        q_s4,
        m,
        l,
        rho,
        rho_coeffs,
        arc_counts,
        nonzero_window,
        trace,
        kappa_check,
        n_check,
        v_check,
        split_check,
    };
    let mut failed = Vec::new();
    if !rep.kappa_check {
        failed.push("L/M ≥ κ");
    }
    if !rep.n_check {
        failed.push("M, L ≥ N");
    }
    if !rep.v_check {
        failed.push("Δ ∈ V");
    }
    if !rep.split_check {
        failed.push("L ≥ |J|/(Rp+1)");
    }
    if !failed.is_empty() {
        return Err(Error::LemmaViolation(format!(
            "s={s} M={m} L={l}: {}",
            failed.join(", ")
        )));
    }
    Ok(rep)
}

/// `Δ(n)` on `[n_lo, n_hi)` from direct visits of both orbits: a 64-bit
/// fixed-point sweep with exact fallback near the discontinuities.
pub fn brute_force_trace(f: &RoofPC, x: &SymReal, y: &SymReal, n_lo: u64, n_hi: u64) -> Result<Vec<Segment>> {
    let b = f.basis();
    let p = f.p();
    let step = b.ctx().alpha_fixed64()?;
    let xi_fix: Vec<u64> = f.xi().iter().map(|z| fix64(b, z)).collect::<Result<_>>()?;
    let guard = n_hi.saturating_add(16);
    let locate = |pos: u64, z: &SymReal, j: u64| -> Result<usize> {
        if xi_fix.iter().all(|&q| pos.wrapping_sub(q).min(q.wrapping_sub(pos)) > guard) {
            let k = xi_fix.partition_point(|&q| q <= pos);
            Ok(if k == 0 { p - 1 } else { k - 1 })
        } else {
            f.locate(&f.rotate(z, j as i64))
        }
    };
    let (x0, y0) = (fix64(b, x)?, fix64(b, y)?);
    let mut diff = vec![0i64; p];
    let mut cache: HashMap<Vec<i64>, SymReal> = HashMap::new();
    let mut out: Vec<Segment> = Vec::new();
    let mut changed = true;
    for j in 0..n_hi {
        if j >= n_lo {
            if changed || out.is_empty() {
                let d = cache
                    .entry(diff.clone())
                    .or_insert_with(|| {
                        let k: Vec<BigInt> = diff.iter().map(|&c| BigInt::from(c)).collect();
                        SymReal::combination_big(f.values(), &k)
                    })
                    .clone();
                match out.last_mut() {
                    Some(last) if last.delta == d => last.end = j,
                    _ => out.push(Segment {
                        start: j,
                        end: j,
                        delta: d,
                    }),
                }
                changed = false;
            } else if let Some(last) = out.last_mut() {
                last.end = j;
            }
        }
        let t = step.wrapping_mul(j);
        let ix = locate(x0.wrapping_add(t), x, j)?;
        let iy = locate(y0.wrapping_add(t), y, j)?;
        if ix != iy {
            diff[ix] += 1;
            diff[iy] -= 1;
            changed = true;
        }
    }
    Ok(out)
}

/// `count` dyadic pairs `x, y ∈ 2⁻⁴⁰ℤ ∩ [0, 1)` with `0 < |x − y| < δ`, in
/// random order within each pair.
pub fn random_close_pairs(delta: &BigRational, count: usize, seed: u64) -> Vec<(SymReal, SymReal)> {
    let denom: i64 = 1 << 40;
    let delta_f = delta.to_f64().unwrap_or(0.0).min(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let gap = ((delta_f * rng.gen_range(0.5..0.99) * denom as f64) as i64).max(1);
            let xn = rng.gen_range(0..denom - gap);
            let (x, y) = (SymReal::frac(xn, denom), SymReal::frac(xn + gap, denom));
            if rng.gen_bool(0.5) {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect()
}

/// Parameters of the R-property experiment.
#[derive(Debug, Clone)]
pub struct RPropertyParams {
    pub t0: f64,
    /// Admissible flow shifts.
    pub p: Vec<f64>,
    pub eps: f64,
    pub n: u64,
    pub trials: usize,
    pub seed: u64,
    /// Replace the shift by this value (negative control).
    pub forced_shift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOutcome {
    pub x: f64,
    pub y: f64,
    pub s: usize,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "L")]
    pub l: u64,
    pub shift: f64,
    pub shift_in_p: bool,
    pub flow_window: (i64, i64),
    pub fraction: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RPropertyStats {
    pub trials: usize,
    pub passed: usize,
    pub pass_rate: f64,
    pub holds: bool,
    pub pairs: Vec<PairOutcome>,
}

/// Samples close pairs, obtains witnesses and measures how often the
/// time-`t₀` orbits stay `ε`-close after the shift.
pub fn verify_r_property(f: &RoofPC, k: &RatnerConstants, params: &RPropertyParams) -> Result<RPropertyStats> {
    if params.p.is_empty() {
        return Err(Error::Precondition("the shift set P is empty".into()));
    }
    if params.t0 == 0.0 || !params.t0.is_finite() {
        return Err(Error::Precondition("t0 must be a nonzero real".into()));
    }
    let backward = params.t0 < 0.0;
    let g = if backward { f.reflected()? } else { f.clone() };
    let b = f.basis();
    let delta = k.delta(params.n);
    let delta_f = delta.to_f64().unwrap_or(0.0);
    let a = b.to_f64(f.min_value());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let denom: i64 = 1 << 40;
    let mut pairs = Vec::with_capacity(params.trials);
    for _ in 0..params.trials {
        // Dyadic points keep the pair exact and off ℚ + ℚα coincidences
        // with the discontinuities at the scales involved.
        let xn: i64 = rng.gen_range(0..denom);
        let gap = (delta_f * rng.gen_range(0.3..0.9) * denom as f64).max(1.0) as i64;
        let x = SymReal::frac(xn, denom);
        let y = SymReal::frac(xn + gap, denom);
        let h = rng.gen_range(0.1..0.9) * a;
        let (gx, gy) = if backward { (-&x, -&y) } else { (x.clone(), y.clone()) };
        let w = find_witness(&g, k, &gx, &gy, params.n)?;
        // Base-level Δ for f: forward directly, backward via the reflection.
        let rho = b.to_f64(&w.rho);
        let shift = params.forced_shift.unwrap_or(if backward { rho } else { -rho });
        let shift_in_p = params.p.iter().any(|&q| (q - shift).abs() < 1e-9);
        let (xf, yf) = (b.to_f64(&x), b.to_f64(&y));
        let (window, fraction) = shadow_fraction(f, xf, yf, h, w.m, w.l, params.t0, shift, params.eps, backward);
        let passed = shift_in_p && fraction > 1.0 - params.eps && (window.1 - window.0) as u64 >= params.n;
        pairs.push(PairOutcome {
            x: xf,
            y: yf,
            s: w.s,
            m: w.m,
            l: w.l,
            shift,
            shift_in_p,
            flow_window: window,
            fraction,
            passed,
        });
    }
    let passed = pairs.iter().filter(|p| p.passed).count();
    let pass_rate = passed as f64 / params.trials.max(1) as f64;
    Ok(RPropertyStats {
        trials: params.trials,
        passed,
        pass_rate,
        holds: pass_rate >= 1.0 - params.eps,
        pairs,
    })
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Birkhoff sum `f⁽ᵐ⁾(x)` in floating point, for `m ≥ 0`, along `±α`.
fn birkhoff_f64(f: &RoofPC, x: f64, m: u64, dir: f64) -> (f64, f64) {
    let alpha = f.basis().ctx().alpha_f64() * dir;
    let mut sum = 0.0;
    let mut z = x;
    for _ in 0..m {
        if dir < 0.0 {
            z = (z + alpha).rem_euclid(1.0);
            sum += f.value_at_f64(z);
        } else {
            sum += f.value_at_f64(z);
            z = (z + alpha).rem_euclid(1.0);
        }
    }
    (sum, z)
}

/// Fraction of `k` in the flow window with
/// `d(S_{k t₀}(x, h), S_{k t₀ + shift}(y, h)) < ε`.
#[allow(clippy::too_many_arguments)]
fn shadow_fraction(
    f: &RoofPC,
    x: f64,
    y: f64,
    h: f64,
    m: u64,
    l: u64,
    t0: f64,
    shift: f64,
    eps: f64,
    backward: bool,
) -> ((i64, i64), f64) {
    use crate::flowlab::{flow_map_f64, FloatPoint};
    let dir = if backward { -1.0 } else { 1.0 };
    // Times at which the x-orbit sits at base index ±M and ±(M + L + 1).
    let (sm, zx) = birkhoff_f64(f, x, m, dir);
    let (sy, zy) = birkhoff_f64(f, y, m, dir);
    let (t_start, t_end) = if backward {
        // Base indices −M−L … −M: times [f⁽⁻ᴹ⁻ᴸ⁾(x), f⁽⁻ᴹ⁺¹⁾(x)) − h.
        let (sl, _) = birkhoff_f64(f, zx, l, dir);
        (-(sm + sl) - h, -(sm - f.value_at_f64(zx)) - h)
    } else {
        let (sl, _) = birkhoff_f64(f, zx, l + 1, dir);
        (sm - h, sm + sl - h)
    };
    let k_lo = (t_start / t0).min(t_end / t0).ceil() as i64;
    let k_hi = (t_start / t0).max(t_end / t0).floor() as i64;
    if k_hi <= k_lo {
        return ((k_lo, k_hi), 0.0);
    }
    // Anchor both orbits at base index ±M, height 0.
    let ax = FloatPoint { x: zx, s: 0.0 };
    let ay = FloatPoint { x: zy, s: 0.0 };
    let tx0 = dir * sm - h;
    let ty0 = dir * sy - h;
    let mut good = 0u64;
    let mut px = flow_map_f64(f, ax, k_lo as f64 * t0 - tx0);
    let mut py = flow_map_f64(f, ay, k_lo as f64 * t0 + shift - ty0);
    for k in k_lo..=k_hi {
        if k > k_lo {
            px = flow_map_f64(f, px, t0);
            py = flow_map_f64(f, py, t0);
        }
        if circle_dist(px.x, py.x) + (px.s - py.s).abs() < eps {
            good += 1;
        }
    }
    let len = (k_hi - k_lo) as f64;
    ((k_lo, k_hi), good as f64 / len)
}
