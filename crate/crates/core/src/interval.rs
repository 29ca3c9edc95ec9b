//! Closed rational intervals used as certified enclosures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Self { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Whether the width is at most `2^-bits`.
    pub fn width_le_bits(&self, bits: u32) -> bool {
        self.width() * pow2(bits) <= BigRational::one()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    /// Sign of every element if it is uniform; `None` if zero is inside and
    /// the interval is not the single point zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = if -&self.lo > self.hi {
                -&self.lo
            } else {
                self.hi.clone()
            };
            Self {
                lo: BigRational::zero(),
                hi: m,
            }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    /// Outward rounding to dyadic endpoints with denominator `2^bits`; keeps
    /// numerator and denominator sizes bounded during long evaluations.
    pub fn round_out(&self, bits: u32) -> Self {
        let s = pow2(bits);
        let lo = (&self.lo * &s).floor() / &s;
        let hi = (&self.hi * &s).ceil() / &s;
        Self { lo, hi }
    }

    /// Enclosure of the square root of a non-negative interval, with endpoint
    /// error at most `2^-bits`.
    pub fn sqrt(&self, bits: u32) -> Option<Self> {
        if self.lo.is_negative() {
            return None;
        }
        let s2 = BigRational::from_integer(BigInt::one() << (2 * bits as usize));
        let lo_int = (&self.lo * &s2).floor().to_integer();
        let hi_int = (&self.hi * &s2).ceil().to_integer();
        let den = BigInt::one() << bits as usize;
        let lo = BigRational::new(lo_int.sqrt(), den.clone());
        let mut hr = hi_int.sqrt();
        if &hr * &hr < hi_int {
            hr += 1;
        }
        let hi = BigRational::new(hr, den);
        Some(Self { lo, hi })
    }

    pub fn floor_bounds(&self) -> (BigInt, BigInt) {
        (self.lo.floor().to_integer(), self.hi.floor().to_integer())
    }
}

pub fn pow2(bits: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << bits as usize)
}

/// Ceiling division for non-negative big integers.
pub fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_encloses() {
        let i = RatInterval::point(r(3, 1)).sqrt(40).unwrap();
        assert!(i.width_le_bits(39));
        let lo = i.lo.to_f64().unwrap();
        let hi = i.hi.to_f64().unwrap();
        assert!(lo <= 3f64.sqrt() && 3f64.sqrt() <= hi);
    }

    #[test]
    fn mul_signs() {
        let a = RatInterval::new(r(-1, 1), r(2, 1));
        let b = RatInterval::new(r(-3, 1), r(1, 1));
        let c = &a * &b;
        assert_eq!(c.lo, r(-6, 1));
        assert_eq!(c.hi, r(3, 1));
        assert_eq!(c.sign(), None);
        assert_eq!(RatInterval::zero().sign(), Some(0));
    }

    #[test]
    fn round_out_contains_original() {
        let a = RatInterval::new(r(1, 3), r(2, 3));
        let b = a.round_out(10);
        assert!(b.lo <= a.lo && b.hi >= a.hi);
        assert!(b.width() <= a.width() + r(2, 1024));
    }
}
