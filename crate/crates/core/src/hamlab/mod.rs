//! Quasi-periodic Hamiltonian flows on the two-torus.
//!
//! `H(x, y) = α₁x + α₂y + P(x, y)` with `P` a real trigonometric
//! polynomial, and the flow is the Hamiltonian field slowed down by a
//! positive weight `g`, `X = X_H / g`. Orbits are integrated in the
//! parameter `τ` of `X_H` itself with `dt/dτ = g`, which keeps the
//! equations smooth at the vertex zeros of `g`; the physical time `t` is
//! carried as the third state component.

mod ode;
mod section;
mod svg;

pub use section::{
    area_identity_check, first_hit, induced_coordinate, return_map, section_profile, AreaReport, JumpEstimate, ProfileSample,
    ReturnFailure, SectionProfile, Transversal,
};
pub use svg::phase_portrait_svg;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const TAU: f64 = 2.0 * PI;

/// One mode `c·cos 2π(kx·x + ky·y) + s·sin 2π(kx·x + ky·y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub kx: i64,
    pub ky: i64,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Real trigonometric polynomial on the torus `ℝ²/ℤ²`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPoly2 {
    pub modes: Vec<Mode>,
}

impl TrigPoly2 {
    pub fn new(modes: Vec<Mode>) -> Self {
        TrigPoly2 { modes }
    }

    pub fn zero() -> Self {
        TrigPoly2::default()
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly2::new(vec![Mode { kx: 0, ky: 0, cos: c, sin: 0.0 }])
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| (m.cos == 0.0 && m.sin == 0.0) || (m.kx == 0 && m.ky == 0 && m.cos == 0.0))
    }

    /// Value and gradient.
    pub fn eval_grad(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
        for m in &self.modes {
            let ph = TAU * (m.kx as f64 * x + m.ky as f64 * y);
            let (s, c) = ph.sin_cos();
            v += m.cos * c + m.sin * s;
            let dphase = -m.cos * s + m.sin * c;
            gx += TAU * m.kx as f64 * dphase;
            gy += TAU * m.ky as f64 * dphase;
        }
        (v, gx, gy)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_grad(x, y).0
    }

    /// Hessian `(Pxx, Pxy, Pyy)`.
    pub fn hessian(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        for m in &self.modes {
            let ph = TAU * (m.kx as f64 * x + m.ky as f64 * y);
            let (s, c) = ph.sin_cos();
            let second = -(m.cos * c + m.sin * s) * TAU * TAU;
            let (kx, ky) = (m.kx as f64, m.ky as f64);
            xx += kx * kx * second;
            xy += kx * ky * second;
            yy += ky * ky * second;
        }
        (xx, xy, yy)
    }

    /// Mean over the torus.
    pub fn mean(&self) -> f64 {
        self.modes.iter().filter(|m| m.kx == 0 && m.ky == 0).map(|m| m.cos).sum()
    }

    /// Upper bounds for `sup|∂P/∂x|` and `sup|∂P/∂y|`.
    pub fn gradient_bounds(&self) -> (f64, f64) {
        let mut bx = 0.0;
        let mut by = 0.0;
        for m in &self.modes {
            let a = m.cos.abs() + m.sin.abs();
            bx += TAU * (m.kx.unsigned_abs() as f64) * a;
            by += TAU * (m.ky.unsigned_abs() as f64) * a;
        }
        (bx, by)
    }

    /// Lower bound `mean − Σ_{k≠0} (|c| + |s|)`.
    pub fn lower_bound(&self) -> f64 {
        let osc: f64 =
            self.modes.iter().filter(|m| m.kx != 0 || m.ky != 0).map(|m| m.cos.abs() + m.sin.abs()).sum();
        self.mean() - osc
    }
}

/// Weight `g = G(x, y)·Π_v (sin²π(x−vₓ) + sin²π(y−v_y))`: a positive
/// trigonometric polynomial times a quadratic zero at each declared vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub poly: TrigPoly2,
    #[serde(default)]
    pub vertices: Vec<(f64, f64)>,
}

impl Weight {
    pub fn one() -> Self {
        Weight { poly: TrigPoly2::constant(1.0), vertices: Vec::new() }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut v = self.poly.eval(x, y);
        for &(vx, vy) in &self.vertices {
            let a = (PI * (x - vx)).sin();
            let b = (PI * (y - vy)).sin();
            v *= a * a + b * b;
        }
        v
    }

    /// Index of a declared vertex within `eps` of `(x, y)` on the torus.
    pub fn vertex_near(&self, x: f64, y: f64, eps: f64) -> Option<usize> {
        self.vertices.iter().position(|&(vx, vy)| torus_dist(x - vx, y - vy) < eps)
    }

    /// Minimum of `G` over a `n × n` grid.
    fn grid_min(&self, n: usize) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                m = m.min(self.poly.eval(i as f64 / n as f64, j as f64 / n as f64));
            }
        }
        m
    }
}

/// Ratio within `1e−12·q` of some `p/q` with `q ≤ 1000`.
fn looks_rational(r: f64) -> bool {
    (1..=1000).any(|q| {
        let t = r * q as f64;
        (t - t.round()).abs() < 1e-12 * q as f64
    })
}

fn wrap_half(t: f64) -> f64 {
    t - t.round()
}

fn torus_dist(dx: f64, dy: f64) -> f64 {
    wrap_half(dx).hypot(wrap_half(dy))
}

/// Critical point of `H` with its Hessian type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub y: f64,
    pub saddle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSystem {
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(rename = "P", default)]
    pub p: TrigPoly2,
    pub g: Weight,
    /// Declared critical points, if known.
    #[serde(default)]
    pub critical: Vec<(f64, f64)>,
}

impl HamiltonianSystem {
    /// Validates the frequencies and the positivity of the weight.
    pub fn new(alpha1: f64, alpha2: f64, p: TrigPoly2, g: Weight) -> Result<Self> {
        let sys = HamiltonianSystem { alpha1, alpha2, p, g, critical: Vec::new() };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1.is_finite() && self.alpha2.is_finite()) || self.alpha2 <= 0.0 || self.alpha1 == 0.0 {
            return Err(Error::Precondition("need finite α₁ ≠ 0 and α₂ > 0".into()));
        }
        let r = self.alpha1 / self.alpha2;
        if looks_rational(r) {
            return Err(Error::Precondition(format!("α₁/α₂ = {r} looks rational")));
        }
        let all_finite = |t: &TrigPoly2| t.modes.iter().all(|m| m.cos.is_finite() && m.sin.is_finite());
        if !all_finite(&self.p) || !all_finite(&self.g.poly) {
            return Err(Error::Precondition("non-finite coefficient".into()));
        }
        if self.g.poly.lower_bound() <= 0.0 && self.g.grid_min(256) <= 0.0 {
            return Err(Error::Precondition("weight is not strictly positive".into()));
        }
        Ok(())
    }

    pub fn h(&self, x: f64, y: f64) -> f64 {
        self.alpha1 * x + self.alpha2 * y + self.p.eval(x, y)
    }

    /// `(∂H/∂x, ∂H/∂y)`.
    pub fn grad_h(&self, x: f64, y: f64) -> (f64, f64) {
        let (_, px, py) = self.p.eval_grad(x, y);
        (self.alpha1 + px, self.alpha2 + py)
    }

    /// `X_H = (∂H/∂y, −∂H/∂x)`.
    pub fn hamiltonian_field(&self, x: f64, y: f64) -> (f64, f64) {
        let (hx, hy) = self.grad_h(x, y);
        (hy, -hx)
    }

    /// True when `∇H` never vanishes, certified by the coefficient bound.
    pub fn certified_no_critical_points(&self) -> bool {
        let (bx, by) = self.p.gradient_bounds();
        bx < self.alpha1.abs() || by < self.alpha2.abs()
    }

    /// Smooth right-hand side in the parameter of `X_H`; third component `dt/dτ = g`.
    fn rhs(&self) -> impl Fn(&ode::State) -> ode::State + '_ {
        move |s: &ode::State| {
            let (u, v) = self.hamiltonian_field(s[0], s[1]);
            [u, v, self.g.eval(s[0], s[1])]
        }
    }

    /// Newton search for critical points of `H` from an `n × n` grid of seeds.
    pub fn critical_points(&self, n: usize) -> Vec<CriticalPoint> {
        let mut out: Vec<CriticalPoint> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (mut x, mut y) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                let mut ok = false;
                for _ in 0..60 {
                    let (hx, hy) = self.grad_h(x, y);
                    if hx.hypot(hy) < 1e-14 {
                        ok = true;
                        break;
                    }
                    let (a, b, c) = self.p.hessian(x, y);
                    let det = a * c - b * b;
                    if det.abs() < 1e-14 {
                        break;
                    }
                    let dx = (c * hx - b * hy) / det;
                    let dy = (a * hy - b * hx) / det;
                    x -= dx;
                    y -= dy;
                    if dx.hypot(dy) < 1e-15 {
                        ok = self.grad_h(x, y).0.hypot(self.grad_h(x, y).1) < 1e-10;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                let (x, y) = (x.rem_euclid(1.0), y.rem_euclid(1.0));
                if out.iter().any(|p| torus_dist(p.x - x, p.y - y) < 1e-8) {
                    continue;
                }
                let (a, b, c) = self.p.hessian(x, y);
                out.push(CriticalPoint { x, y, saddle: a * c - b * b < 0.0 });
            }
        }
        out.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
        out
    }

    /// Linear flow: `P ≡ 0` with the given weight.
    pub fn linear(alpha1: f64, alpha2: f64, g: Weight) -> Result<Self> {
        HamiltonianSystem::new(alpha1, alpha2, TrigPoly2::zero(), g)
    }

    /// Trap fixture: `P = (A/2π) sin 2πx cos 2πy` with `A = 2(α₁ + α₂)`,
    /// giving two saddles and two centres; `g` vanishes quadratically at
    /// the saddles.
    pub fn trap_fixture(alpha1: f64, alpha2: f64) -> Result<Self> {
        let amp = 2.0 * (alpha1.abs() + alpha2.abs());
        let p = TrigPoly2::new(vec![
            Mode { kx: 1, ky: 1, cos: 0.0, sin: amp / (2.0 * TAU) },
            Mode { kx: 1, ky: -1, cos: 0.0, sin: amp / (2.0 * TAU) },
        ]);
        let mut sys = HamiltonianSystem::new(alpha1, alpha2, p, Weight::one())?;
        let crit = sys.critical_points(16);
        sys.g.vertices = crit.iter().filter(|c| c.saddle).map(|c| (c.x, c.y)).collect();
        sys.critical = crit.iter().map(|c| (c.x, c.y)).collect();
        Ok(sys)
    }
}

/// Velocity `X_H / g` at a point.
pub fn vector_field(sys: &HamiltonianSystem, x: f64, y: f64) -> Result<(f64, f64)> {
    if let Some(i) = sys.g.vertex_near(x, y, 1e-12) {
        return Err(Error::Precondition(format!("({x}, {y}) is the declared vertex {i}")));
    }
    let g = sys.g.eval(x, y);
    if g <= 0.0 {
        return Err(Error::Precondition(format!("weight vanishes at ({x}, {y})")));
    }
    let (u, v) = sys.hamiltonian_field(x, y);
    Ok((u / g, v / g))
}

/// Sampled orbit. Coordinates are lifted to `ℝ²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// `(t, x, y)` at accepted steps, starting with the initial point.
    pub samples: Vec<(f64, f64, f64)>,
    pub end: (f64, f64),
    /// `max |H − H(start)|` over accepted steps.
    pub h_drift: f64,
}

/// Fixed-point threshold on `|X_H|`.
const FIXED_EPS: f64 = 1e-10;

/// Integrates the flow of `X` from `(x, y)` for physical time `duration ≥ 0`.
pub fn integrate(sys: &HamiltonianSystem, x: f64, y: f64, duration: f64, tol: f64) -> Result<Trajectory> {
    if duration.is_nan() || duration < 0.0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("need duration ≥ 0 and tol > 0".into()));
    }
    let (u, v) = sys.hamiltonian_field(x, y);
    if u.hypot(v) < FIXED_EPS {
        return Err(Error::Precondition(format!("({x}, {y}) is a fixed point")));
    }
    let h0 = sys.h(x, y);
    let mut samples = vec![(0.0, x, y)];
    let mut drift = 0.0f64;
    if duration == 0.0 {
        return Ok(Trajectory { samples, end: (x, y), h_drift: 0.0 });
    }
    let rhs = sys.rhs();
    let event = |s: &ode::State| s[2] - duration;
    let stop = ode::integrate_until(&rhs, [x, y, 0.0], 1e-3, tol, &event, f64::INFINITY, &mut |s| {
        drift = drift.max((sys.h(s[0], s[1]) - h0).abs());
        samples.push((s[2], s[0], s[1]));
        true
    });
    match stop {
        ode::Stop::Event(s) => {
            drift = drift.max((sys.h(s[0], s[1]) - h0).abs());
            samples.push((s[2], s[0], s[1]));
            Ok(Trajectory { samples, end: (s[0], s[1]), h_drift: drift })
        }
        ode::Stop::Collapse(s) | ode::Stop::Cap(s) | ode::Stop::Halt(s) => Err(Error::Numerical(format!(
            "step size collapsed at ({}, {}) after time {}",
            s[0], s[1], s[2]
        ))),
    }
}
