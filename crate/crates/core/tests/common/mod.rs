#![allow(dead_code)]

use num_rational::BigRational;
use specflow::cf_arith::CfContext;
use specflow::roof::{presets, RoofPC};
use specflow::symreal::{Basis, SymReal};
use std::sync::Arc;

pub fn basis(alpha: &str) -> Arc<Basis> {
    let ctx = Arc::new(CfContext::preset(alpha).unwrap());
    Arc::new(presets::standard_basis(ctx).unwrap())
}

pub fn roof(name: &str, alpha: &str) -> RoofPC {
    presets::by_name(name, basis(alpha)).unwrap()
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn b(basis: &Basis, k: i64) -> SymReal {
    basis.sym("b", q(k, 1)).unwrap()
}
