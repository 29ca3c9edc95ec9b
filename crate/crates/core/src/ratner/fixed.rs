//! 64-bit fixed-point circle arithmetic used to locate candidate hits.
//!
//! Positions are `floor(x·2⁶⁴)`; every candidate produced here is re-checked
//! exactly by the caller, so only completeness depends on the error margins.

use crate::error::Result;
use crate::interval::pow2;
use crate::symreal::{Basis, SymReal};
use num_traits::ToPrimitive;

pub const MODULUS: u128 = 1 << 64;

/// `floor(frac(x)·2⁶⁴)`, within one unit.
pub fn fix64(b: &Basis, x: &SymReal) -> Result<u64> {
    let y = b.circle(x)?;
    let e = b.eval(&y, 72)?;
    let v = (&e.lo * pow2(64)).floor().to_integer();
    Ok(v.to_u128().map_or(0, |v| v.min(u64::MAX as u128)) as u64)
}

/// Smallest `x ≥ 0` with `l ≤ (a·x mod m) ≤ r`, for `0 ≤ l ≤ r < m`.
pub fn min_hit(a: u128, m: u128, l: u128, r: u128) -> Option<u128> {
    debug_assert!(l <= r && r < m);
    if l == 0 {
        return Some(0);
    }
    let a = a % m;
    if a == 0 {
        return None;
    }
    let x = l.div_ceil(a);
    if a * x <= r {
        return Some(x);
    }
    // No multiple of a lies in [l, r]; solve for the wrap count y first.
    let y = min_hit(m % a, a, a - r % a, a - l % a)?;
    Some((l + m * y).div_ceil(a))
}

/// All `j` in `[0, limit)` with `(start + j·step) mod 2⁶⁴ ≤ width`.
pub fn hits(start: u64, step: u64, width: u64, limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut j0: u64 = 0;
    while j0 < limit {
        // (start + step·(j0 + x)) mod m ≤ width ⇔ step·x mod m ∈ [lo, lo + width].
        let base = (start as u128 + step as u128 * j0 as u128) % MODULUS;
        let lo = (MODULUS - base) % MODULUS;
        let hi = lo + width as u128;
        let x = if hi < MODULUS {
            min_hit(step as u128, MODULUS, lo, hi)
        } else {
            let a = min_hit(step as u128, MODULUS, lo, MODULUS - 1);
            let b = min_hit(step as u128, MODULUS, 0, hi - MODULUS);
            match (a, b) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            }
        };
        let Some(x) = x else { break };
        let j = j0 as u128 + x;
        if j >= limit as u128 {
            break;
        }
        out.push(j as u64);
        j0 = j as u64 + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_hit_matches_scan() {
        let m = 1009u128;
        for a in [1u128, 2, 17, 500, 1008] {
            for l in [0u128, 1, 5, 300, 1000] {
                for w in [0u128, 3, 40] {
                    let r = (l + w).min(m - 1);
                    let brute = (0..2 * m).find(|&x| {
                        let v = a * x % m;
                        l <= v && v <= r
                    });
                    assert_eq!(min_hit(a, m, l, r), brute, "a={a} l={l} r={r}");
                }
            }
        }
    }

    #[test]
    fn hits_match_scan() {
        let step = 0x9E37_79B9_7F4A_7C15u64;
        for start in [0u64, 12345, u64::MAX - 7, 1 << 63] {
            let width = 1u64 << 58;
            let brute: Vec<u64> = (0..5000u64)
                .filter(|&j| start.wrapping_add(step.wrapping_mul(j)) <= width)
                .collect();
            assert_eq!(hits(start, step, width, 5000), brute);
        }
    }
}
