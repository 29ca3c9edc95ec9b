//! Named roofs used throughout the tests and the command line.

use super::RoofPC;
use crate::cf_arith::CfContext;
use crate::error::{Error, Result};
use crate::symreal::{Basis, SymReal};
use num_rational::BigRational;
use num_traits::One;
use std::sync::Arc;

pub const NAMES: [&str; 5] = ["example1", "p1_fail_orbit", "p1_fail_gamma", "p2_fail_values", "solvable_eigen"];

/// The basis `{1, α, b, αb}` with `b = √3`, plus `γ = √5 − 2` and `bγ`.
pub fn standard_basis(ctx: Arc<CfContext>) -> Result<Basis> {
    let mut basis = Basis::new(ctx.clone());
    basis.add_symbol("b", "sqrt(3)")?;
    basis.add_symbol("alpha_b", "alpha*sqrt(3)")?;
    basis.add_symbol("gamma", "sqrt(5)-2")?;
    basis.add_symbol("b_gamma", "sqrt(3)*(sqrt(5)-2)")?;
    let one = BigRational::one();
    let b = basis.sym("b", one.clone())?;
    let ab = basis.sym("alpha_b", one.clone())?;
    let bg = basis.sym("b_gamma", one.clone())?;
    basis.set_alpha_action("b", ab.clone())?;
    basis.set_product("b", "gamma", bg)?;
    basis.set_product("b", "b", SymReal::int(3))?;
    if let Some((u, v)) = ctx.alpha_squared() {
        // α·(αb) = α²b = u·b + v·αb.
        let aab = &b.scale(&u) + &ab.scale(&v);
        basis.set_product("alpha", "alpha_b", aab)?;
    }
    Ok(basis)
}

fn build(basis: Arc<Basis>, xi: [SymReal; 2], d: [SymReal; 2], v1: SymReal) -> Result<RoofPC> {
    RoofPC::new(basis, xi.to_vec(), d.to_vec(), v1)
}

/// `f = 1 + √3·χ[0, 1/3)`.
pub fn example1(basis: Arc<Basis>) -> Result<RoofPC> {
    let b = basis.sym("b", BigRational::one())?;
    build(
        basis,
        [SymReal::zero(), SymReal::frac(1, 3)],
        [-&b, b.clone()],
        b.add_rational(&BigRational::one()),
    )
}

/// As [`example1`] with the second discontinuity moved to `α`.
pub fn p1_fail_orbit(basis: Arc<Basis>) -> Result<RoofPC> {
    let b = basis.sym("b", BigRational::one())?;
    build(
        basis,
        [SymReal::zero(), SymReal::alpha()],
        [-&b, b.clone()],
        b.add_rational(&BigRational::one()),
    )
}

/// As [`example1`] with the second discontinuity at `γ ∉ ℚ + ℚα`.
pub fn p1_fail_gamma(basis: Arc<Basis>) -> Result<RoofPC> {
    let b = basis.sym("b", BigRational::one())?;
    let g = basis.sym("gamma", BigRational::one())?;
    build(
        basis,
        [SymReal::zero(), g],
        [-&b, b.clone()],
        b.add_rational(&BigRational::one()),
    )
}

/// Values `2b` on `[0, 1/2)` and `b` on `[1/2, 1)`.
pub fn p2_fail_values(basis: Arc<Basis>) -> Result<RoofPC> {
    let b = basis.sym("b", BigRational::one())?;
    build(
        basis,
        [SymReal::zero(), SymReal::frac(1, 2)],
        [-&b, b.clone()],
        b.scale_int(2),
    )
}

/// `f = 1 + χ[0, α)`.
pub fn solvable_eigen(basis: Arc<Basis>) -> Result<RoofPC> {
    build(
        basis,
        [SymReal::zero(), SymReal::alpha()],
        [SymReal::int(-1), SymReal::int(1)],
        SymReal::int(2),
    )
}

pub fn by_name(name: &str, basis: Arc<Basis>) -> Result<RoofPC> {
    match name {
        "example1" => example1(basis),
        "p1_fail_orbit" => p1_fail_orbit(basis),
        "p1_fail_gamma" => p1_fail_gamma(basis),
        "p2_fail_values" => p2_fail_values(basis),
        "solvable_eigen" => solvable_eigen(basis),
        other => Err(Error::Config(format!("unknown roof preset {other:?}"))),
    }
}
