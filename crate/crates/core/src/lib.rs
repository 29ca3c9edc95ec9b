//! Exact arithmetic and experiments for special flows over irrational
//! rotations with piecewise-constant roofs.
//!
//! The modules build on each other bottom-up:
//!
//! * [`cf_arith`]: continued fractions of `α` and exact signs of `r + sα`;
//! * [`symreal`]: exact reals over a declared ℚ-independent basis;
//! * [`roof`]: piecewise-constant roofs and the arithmetic property checks;
//! * [`flowlab`]: the special flow, Birkhoff audits and rigidity probes;
//! * [`ratner`]: constants and witnesses for the shadowing lemma;
//! * [`hamlab`]: Poincaré sections of quasi-periodic Hamiltonian flows.

pub mod cf_arith;
pub mod error;
pub mod flowlab;
pub mod hamlab;
pub mod interval;
pub mod ratner;
pub mod roof;
pub mod symreal;

pub use error::{Error, Result};

use std::sync::OnceLock;

/// Default bound on working precision, in bits.
pub const DEFAULT_PRECISION_CAP: u32 = 1 << 16;

/// Working-precision cap in bits, read once from `SPECFLOW_PRECISION_CAP`.
pub fn precision_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("SPECFLOW_PRECISION_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&c: &u32| c >= 64)
            .unwrap_or(DEFAULT_PRECISION_CAP)
    })
}
