//! Solving `u(x + α) − u(x) = ζ(x)` for trigonometric polynomials `ζ`.

use crate::cf_arith::CfContext;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// `Σₙ cₙ e^{2πinx}` with finitely many modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    pub modes: Vec<(i64, Complex64)>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `Σ_k aₖ cos 2πkx + bₖ sin 2πkx` from `(k, aₖ, bₖ)` triples.
    pub fn from_cos_sin(terms: &[(i64, f64, f64)]) -> Self {
        let mut modes = Vec::new();
        for &(k, a, b) in terms {
            if k == 0 {
                modes.push((0, Complex64::new(a, 0.0)));
            } else {
                modes.push((k, Complex64::new(a / 2.0, -b / 2.0)));
                modes.push((-k, Complex64::new(a / 2.0, b / 2.0)));
            }
        }
        let mut p = Self { modes };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.modes.sort_by_key(|m| m.0);
        let mut out: Vec<(i64, Complex64)> = Vec::with_capacity(self.modes.len());
        for &(k, c) in &self.modes {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += c,
                _ => out.push((k, c)),
            }
        }
        self.modes = out;
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.modes
            .iter()
            .find(|m| m.0 == k)
            .map_or(Complex64::new(0.0, 0.0), |m| m.1)
    }

    pub fn degree(&self) -> i64 {
        self.modes.iter().map(|m| m.0.abs()).max().unwrap_or(0)
    }

    /// Real part of the value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.modes
            .iter()
            .map(|&(k, c)| (c * Complex64::from_polar(1.0, TAU * k as f64 * x)).re)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoboundaryReport {
    pub transfer: TrigPoly,
    /// Largest `|u(x+α) − u(x) − ζ(x)|` over the verification grid.
    pub residual: f64,
    pub grid: usize,
    /// Largest `1/|e^{2πinα} − 1|` over the solved modes.
    pub max_divisor: f64,
}

impl CoboundaryReport {
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.residual <= tol {
            Ok(())
        } else {
            Err(Error::Numerical(format!(
                "coboundary residual {:.3e} exceeds tolerance {tol:.3e}",
                self.residual
            )))
        }
    }
}

/// `û(n) = ζ̂(n)/(e^{2πinα} − 1)` for `0 < |n| ≤ truncation`, checked on a
/// uniform grid of `grid` points.
pub fn coboundary_reduce(
    zeta: &TrigPoly,
    ctx: &CfContext,
    truncation: i64,
    grid: usize,
) -> Result<CoboundaryReport> {
    let mean = zeta.coefficient(0);
    if mean.norm() > 1e-12 {
        return Err(Error::Precondition(format!(
            "input must have zero mean, got {:.3e}",
            mean.re
        )));
    }
    if grid == 0 {
        return Err(Error::Precondition("verification grid is empty".into()));
    }
    let alpha = ctx.alpha_f64();
    let mut modes = Vec::new();
    let mut max_divisor: f64 = 0.0;
    for &(k, c) in &zeta.modes {
        if k == 0 || k.abs() > truncation {
            continue;
        }
        // ‖kα‖ from the exact fractional part avoids cancellation for large k.
        let frac = (k as f64 * alpha).rem_euclid(1.0);
        let denom = Complex64::from_polar(1.0, TAU * frac) - 1.0;
        max_divisor = max_divisor.max(1.0 / denom.norm());
        modes.push((k, c / denom));
    }
    let transfer = TrigPoly { modes };
    let residual = (0..grid)
        .map(|i| {
            let x = i as f64 / grid as f64;
            (transfer.eval(x + alpha) - transfer.eval(x) - zeta.eval(x)).abs()
        })
        .fold(0.0, f64::max);
    Ok(CoboundaryReport {
        transfer,
        residual,
        grid,
        max_divisor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input() {
        let r = coboundary_reduce(&TrigPoly::zero(), &CfContext::golden(), 5, 100).unwrap();
        assert!(r.transfer.modes.is_empty());
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn cosine_one_mode() {
        let z = TrigPoly::from_cos_sin(&[(1, 1.0, 0.0)]);
        let r = coboundary_reduce(&z, &CfContext::golden(), 1, 1000).unwrap();
        assert!(r.residual < 1e-10, "{}", r.residual);
    }

    #[test]
    fn nonzero_mean_rejected() {
        let z = TrigPoly::from_cos_sin(&[(0, 0.1, 0.0), (1, 1.0, 0.0)]);
        assert!(matches!(
            coboundary_reduce(&z, &CfContext::golden(), 1, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn truncation_leaves_residual() {
        let z = TrigPoly::from_cos_sin(&[(1, 1.0, 0.0), (3, 0.5, 0.0)]);
        let r = coboundary_reduce(&z, &CfContext::golden(), 1, 1000).unwrap();
        assert!(r.residual > 0.4);
        assert!(r.check(1e-8).is_err());
    }
}
