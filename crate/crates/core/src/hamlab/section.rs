//! Transversal, first-return map and return-time profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ode, HamiltonianSystem};
use crate::{Error, Result};

/// Vertical circle `{x = x₀}` parameterized by `y ∈ [0, 1)`, oriented so
/// that the field crosses it in the `+x` direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transversal {
    pub x0: f64,
    /// `min ∂H/∂y` over the checked samples.
    pub min_normal: f64,
    pub samples: usize,
}

impl Transversal {
    /// Checks `∂H/∂y(x₀, ·) > 0` on `samples` equally spaced points.
    pub fn vertical(sys: &HamiltonianSystem, x0: f64, samples: usize) -> Result<Self> {
        let samples = samples.max(16);
        let mut min_normal = f64::INFINITY;
        for j in 0..samples {
            let y = j as f64 / samples as f64;
            let hy = sys.grad_h(x0, y).1;
            if hy.is_nan() || hy <= 0.0 {
                return Err(Error::Precondition(format!("field is not transversal to x = {x0} at y = {y}")));
            }
            min_normal = min_normal.min(hy);
        }
        Ok(Transversal { x0, min_normal, samples })
    }

    /// Curve parameter with induced coordinate `s ∈ [0, α₂)`.
    pub fn y_of_s(&self, sys: &HamiltonianSystem, s: f64) -> f64 {
        let base = sys.h(self.x0, 0.0);
        let phi = |y: f64| sys.h(self.x0, y) - base - s;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut y = s / sys.alpha2;
        for _ in 0..100 {
            let v = phi(y);
            if v == 0.0 {
                return y;
            }
            if v < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let next = y - v / sys.grad_h(self.x0, y).1;
            y = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-16 || v.abs() < 1e-16 {
                break;
            }
        }
        y
    }
}

/// Induced coordinate `H(x₀, y) − H(x₀, 0)` reduced mod `α₂`.
pub fn induced_coordinate(sys: &HamiltonianSystem, tr: &Transversal, y: f64) -> f64 {
    let s = (sys.h(tr.x0, y) - sys.h(tr.x0, 0.0)).rem_euclid(sys.alpha2);
    if s >= sys.alpha2 {
        0.0
    } else {
        s
    }
}

fn time_cap(sys: &HamiltonianSystem) -> f64 {
    100.0 / sys.alpha2
}

/// Flows `(x, y)` forward to the next lift of the transversal.
/// Returns the hitting height `y` (lifted) and the elapsed time.
pub fn first_hit(sys: &HamiltonianSystem, tr: &Transversal, x: f64, y: f64, tol: f64) -> Result<(f64, f64)> {
    let (u, v) = sys.hamiltonian_field(x, y);
    if u.hypot(v) < super::FIXED_EPS {
        return Err(Error::Precondition(format!("({x}, {y}) is a fixed point")));
    }
    let target = tr.x0 + ((x - tr.x0).floor() + 1.0);
    let rhs = sys.rhs();
    let event = |s: &ode::State| s[0] - target;
    // A lifted orbit that comes back across the normal line through its
    // start, close to the start, is closed and therefore trapped.
    let (mut left, mut prev) = (false, 0.0f64);
    let closed = &mut |s: &ode::State| {
        let (dx, dy) = (s[0] - x, s[1] - y);
        let r = dx.hypot(dy);
        if r > 0.05 {
            left = true;
        }
        let phi = dx * u + dy * v;
        let back = left && r < 0.01 && prev < 0.0 && phi >= 0.0;
        prev = phi;
        !back
    };
    match ode::integrate_until(&rhs, [x, y, 0.0], 1e-3, tol, &event, time_cap(sys), closed) {
        ode::Stop::Event(s) => Ok((s[1], s[2])),
        ode::Stop::Halt(s) => Err(Error::Numerical(format!(
            "orbit of ({x}, {y}) closes up after time {}; trapped",
            s[2]
        ))),
        ode::Stop::Cap(s) => Err(Error::Numerical(format!(
            "no return within time {} from ({x}, {y}); orbit trapped near ({}, {})",
            time_cap(sys),
            s[0].rem_euclid(1.0),
            s[1].rem_euclid(1.0)
        ))),
        ode::Stop::Collapse(s) => Err(Error::Numerical(format!(
            "integration stalled at ({}, {}) from ({x}, {y})",
            s[0].rem_euclid(1.0),
            s[1].rem_euclid(1.0)
        ))),
    }
}

/// First-return map in the induced coordinate: `(s′, return time)`.
pub fn return_map(sys: &HamiltonianSystem, tr: &Transversal, s: f64, tol: f64) -> Result<(f64, f64)> {
    if !(0.0..sys.alpha2).contains(&s) {
        return Err(Error::Precondition(format!("induced coordinate {s} outside [0, α₂)")));
    }
    let y = tr.y_of_s(sys, s);
    let (y1, t) = first_hit(sys, tr, tr.x0, y, tol)?;
    Ok((induced_coordinate(sys, tr, y1), t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub s: f64,
    pub s_return: f64,
    pub return_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnFailure {
    pub index: usize,
    pub s: f64,
    pub message: String,
}

/// Jump of the return time: `d = left limit − right limit` at `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpEstimate {
    pub beta: f64,
    pub d: f64,
    pub left: f64,
    pub right: f64,
    /// Grid cell `[s_k, s_{k+1})` that contained the jump.
    pub cell: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionProfile {
    pub transversal: Transversal,
    pub alpha2: f64,
    pub grid_size: usize,
    pub tol: f64,
    pub samples: Vec<ProfileSample>,
    pub failures: Vec<ReturnFailure>,
    pub jumps: Vec<JumpEstimate>,
    /// Least-squares estimate of `s′ − s` mod `α₂`.
    pub rotation: f64,
    /// `−α₁ mod α₂`: the transversal is crossed in the `+x` direction.
    pub expected_rotation: f64,
    pub rotation_error: f64,
    /// `−1`: the return map is `s ↦ s − α₁`.
    pub orientation: i8,
}

impl SectionProfile {
    pub fn jump_sum(&self) -> f64 {
        self.jumps.iter().map(|j| j.d).sum()
    }

    pub fn max_jump(&self) -> f64 {
        self.jumps.iter().map(|j| j.d.abs()).fold(0.0, f64::max)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("s,s_return,return_time\n");
        for p in &self.samples {
            out.push_str(&format!("{},{},{}\n", p.s, p.s_return, p.return_time));
        }
        out
    }
}

fn circ_dist(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// Return times on the midpoint grid `s_k = (k + ½)α₂/G`, with jumps
/// located by outlying grid differences and refined by bisection.
pub fn section_profile(
    sys: &HamiltonianSystem,
    tr: &Transversal,
    grid_size: usize,
    tol: f64,
) -> Result<SectionProfile> {
    if grid_size < 8 {
        return Err(Error::Precondition("profile grid needs at least 8 points".into()));
    }
    let a2 = sys.alpha2;
    let h = a2 / grid_size as f64;
    let mut slots: Vec<Option<ProfileSample>> = Vec::with_capacity(grid_size);
    let mut failures = Vec::new();
    for k in 0..grid_size {
        let s = (k as f64 + 0.5) * h;
        match return_map(sys, tr, s, tol) {
            Ok((s_return, return_time)) => slots.push(Some(ProfileSample { s, s_return, return_time })),
            Err(e) => {
                failures.push(ReturnFailure { index: k, s, message: e.to_string() });
                slots.push(None);
            }
        }
    }
    let samples: Vec<ProfileSample> = slots.iter().flatten().copied().collect();
    if samples.is_empty() {
        return Err(Error::Numerical("no grid point returned".into()));
    }

    let expected_rotation = (-sys.alpha1).rem_euclid(a2);
    let w0 = (samples[0].s_return - samples[0].s).rem_euclid(a2);
    let mean_off: f64 = samples
        .iter()
        .map(|p| {
            let w = (p.s_return - p.s).rem_euclid(a2);
            let mut off = w - w0;
            off -= a2 * (off / a2).round();
            off
        })
        .sum::<f64>()
        / samples.len() as f64;
    let rotation = (w0 + mean_off).rem_euclid(a2);
    let rotation_error = circ_dist(rotation, expected_rotation, a2);

    let jumps = locate_jumps(sys, tr, &slots, h, tol);
    Ok(SectionProfile {
        transversal: *tr,
        alpha2: a2,
        grid_size,
        tol,
        samples,
        failures,
        jumps,
        rotation,
        expected_rotation,
        rotation_error,
        orientation: -1,
    })
}

fn locate_jumps(
    sys: &HamiltonianSystem,
    tr: &Transversal,
    slots: &[Option<ProfileSample>],
    h: f64,
    tol: f64,
) -> Vec<JumpEstimate> {
    let g = slots.len() as i64;
    let a2 = sys.alpha2;
    // Unwrapped `(s, T)` at grid index `k ∈ ℤ`.
    let at = |k: i64| -> Option<(f64, f64)> {
        let slot = slots[k.rem_euclid(g) as usize]?;
        Some((slot.s + a2 * k.div_euclid(g) as f64, slot.return_time))
    };
    let diff = |k: i64| -> Option<f64> { Some(at(k + 1)?.1 - at(k)?.1) };
    let mut mags: Vec<f64> = (0..g).filter_map(diff).map(f64::abs).collect();
    if mags.is_empty() {
        return Vec::new();
    }
    mags.sort_by(f64::total_cmp);
    let median = mags[mags.len() / 2];
    let scale = slots.iter().flatten().map(|p| p.return_time.abs()).fold(0.0, f64::max);
    let threshold = 25.0 * median + 1e-7 * scale;

    let eval = |s: f64| return_map(sys, tr, s.rem_euclid(a2), tol).ok().map(|r| r.1);
    let mut out = Vec::new();
    for k in 0..g {
        let Some(dk) = diff(k) else { continue };
        if dk.abs() <= threshold {
            continue;
        }
        let local_max = [-2i64, -1, 1, 2].iter().all(|&o| diff(k + o).is_none_or(|d| d.abs() < dk.abs()));
        if !local_max {
            continue;
        }
        let (Some(l1), Some(l0), Some(r0), Some(r1)) = (at(k - 1), at(k), at(k + 1), at(k + 2)) else {
            continue;
        };
        let left_pred = |s: f64| l0.1 + (l0.1 - l1.1) * (s - l0.0) / (l0.0 - l1.0);
        let right_pred = |s: f64| r0.1 + (r1.1 - r0.1) * (s - r0.0) / (r1.0 - r0.0);
        let (mut lo, mut hi) = (l0.0, r0.0);
        // Orbits closer to the separatrix than the integration error may
        // cross it numerically, so the bracket stops well above `tol`.
        let width = (1e-9 * h).max(1e4 * tol * a2);
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            let Some(tm) = eval(mid) else { break };
            if (tm - left_pred(mid)).abs() <= (tm - right_pred(mid)).abs() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let beta = 0.5 * (lo + hi);
        // Richardson: limits of the linear extrapolants from η and η/2 away.
        let eta = (1e-4 * h).max(8.0 * (hi - lo));
        let one_sided = |sign: f64| -> Option<f64> {
            let near = eval(beta + sign * 0.5 * eta)?;
            let far = eval(beta + sign * eta)?;
            Some(2.0 * near - far)
        };
        let (Some(left), Some(right)) = (one_sided(-1.0), one_sided(1.0)) else { continue };
        out.push(JumpEstimate { beta: beta.rem_euclid(a2), d: left - right, left, right, cell: k as usize });
    }
    out.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaReport {
    /// Monte Carlo estimate of `∫_EC g dν`.
    pub mc_estimate: f64,
    /// 95% radius of the estimate.
    pub mc_radius: f64,
    pub mc_samples: usize,
    /// Fraction of samples found in the ergodic component.
    pub ec_fraction: f64,
    /// Whether the coefficient bound rules out critical points, making
    /// every sample part of the ergodic component.
    pub certified_no_traps: bool,
    /// Midpoint-rule integral `∫₀^{α₂} f(s) ds` of the profile.
    pub profile_integral: f64,
    pub relative_discrepancy: f64,
}

const SHARD: u64 = 4096;

/// Compares `∫_EC g dν` against the integral of the return-time profile.
pub fn area_identity_check(
    sys: &HamiltonianSystem,
    tr: &Transversal,
    profile: &SectionProfile,
    mc_samples: usize,
    seed: u64,
) -> Result<AreaReport> {
    if mc_samples == 0 {
        return Err(Error::Precondition("need at least one Monte Carlo sample".into()));
    }
    let certified = sys.certified_no_critical_points();
    let (mut sum, mut sum2, mut in_ec) = (0.0f64, 0.0f64, 0usize);
    let mut drawn = 0usize;
    let mut shard = 0u64;
    while drawn < mc_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        let quota = (SHARD as usize).min(mc_samples - drawn);
        for _ in 0..quota {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen();
            let member = certified || first_hit(sys, tr, x, y, profile.tol.max(1e-9)).is_ok();
            if member {
                let v = sys.g.eval(x, y);
                sum += v;
                sum2 += v * v;
                in_ec += 1;
            }
        }
        drawn += quota;
        shard += 1;
    }
    let n = mc_samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    let valid = profile.samples.len() as f64;
    let profile_integral =
        profile.samples.iter().map(|p| p.return_time).sum::<f64>() / valid * sys.alpha2;
    Ok(AreaReport {
        mc_estimate: mean,
        mc_radius: 1.96 * (var / n).sqrt(),
        mc_samples,
        ec_fraction: in_ec as f64 / n,
        certified_no_traps: certified,
        profile_integral,
        relative_discrepancy: (mean - profile_integral).abs() / profile_integral.abs(),
    })
}
