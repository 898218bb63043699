//! Scalar abstraction for the analytic lane.
//!
//! Everything real-valued (fractional parts, the sine kernel, Kronecker
//! scans, point functions) is generic over [`Real`]. `f64` gives the fast
//! scan lane; [`Fix`] instantiations give verified fixed-point answers at
//! 128/256/512-bit working precision. Membership tests in open intervals
//! always shrink by [`Real::pad`], so a positive answer survives exact
//! evaluation.

mod fixed;

pub use fixed::{Fix, GUARD_BITS};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Mul, Neg, Sub};

pub trait Real:
    Clone
    + PartialOrd
    + std::fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_int(n: i64) -> Self;
    fn from_big_ratio(num: &BigInt, den: &BigInt) -> Self;
    fn mul_nat(&self, n: u64) -> Self;
    /// `self / o`; caller guarantees `o` is not (numerically) zero.
    fn div(&self, o: &Self) -> Self;
    fn recip(&self) -> Self {
        Self::one().div(self)
    }
    fn abs(&self) -> Self;
    fn floor_int(&self) -> BigInt;
    /// `x - floor(x)`, in `[0, 1)`.
    fn fract(&self) -> Self;
    fn sin(&self) -> Self;
    fn sqrt_nat(n: u64) -> Self;
    fn pi() -> Self;
    /// Outward-rounding slack: strictly dominates the rounding error of any
    /// expression chain this crate evaluates at this precision.
    fn pad() -> Self;
    fn to_decimal(&self, digits: usize) -> String;
    fn approx_f64(&self) -> f64;
    /// Parses a plain decimal literal.
    fn from_decimal(s: &str) -> Option<Self>;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_big_ratio(&BigInt::from(num), &BigInt::from(den))
    }
}

impl Real for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_big_ratio(num: &BigInt, den: &BigInt) -> Self {
        num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN)
    }
    fn mul_nat(&self, n: u64) -> Self {
        self * n as f64
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn floor_int(&self) -> BigInt {
        BigInt::from(self.floor() as i64)
    }
    fn fract(&self) -> Self {
        let f = self - self.floor();
        if f < 0.0 {
            f + 1.0
        } else {
            f
        }
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn sqrt_nat(n: u64) -> Self {
        (n as f64).sqrt()
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn pad() -> Self {
        1e-9
    }
    fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*}", digits.min(17), self)
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
    fn from_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl<const FRAC: u32> Real for Fix<FRAC> {
    fn from_int(n: i64) -> Self {
        Fix::from_int(n)
    }
    fn from_big_ratio(num: &BigInt, den: &BigInt) -> Self {
        Fix::from_big_ratio(num, den)
    }
    fn mul_nat(&self, n: u64) -> Self {
        Fix::mul_nat(self, n)
    }
    fn div(&self, o: &Self) -> Self {
        Fix::div(self, o)
    }
    fn abs(&self) -> Self {
        Fix::abs(self)
    }
    fn floor_int(&self) -> BigInt {
        Fix::floor_int(self)
    }
    fn fract(&self) -> Self {
        Fix::fract(self)
    }
    fn sin(&self) -> Self {
        Fix::sin(self)
    }
    fn sqrt_nat(n: u64) -> Self {
        Fix::sqrt_nat(n)
    }
    fn pi() -> Self {
        Fix::pi()
    }
    fn pad() -> Self {
        Fix::pad()
    }
    fn to_decimal(&self, digits: usize) -> String {
        Fix::to_decimal(self, digits)
    }
    fn approx_f64(&self) -> f64 {
        Fix::to_f64(self)
    }
    fn from_decimal(s: &str) -> Option<Self> {
        Fix::from_decimal_str(s)
    }
}

/// Fractional part as a free function, under its usual short name.
pub fn frac<T: Real>(x: &T) -> T {
    x.fract()
}

/// Distance of `x` to `target` modulo 1.
pub fn dist_mod1<T: Real>(x: &T, target: &T) -> T {
    let d = (x.clone() - target.clone()).fract();
    let one_minus = T::one() - d.clone();
    if d < one_minus {
        d
    } else {
        one_minus
    }
}

/// Membership of `x` in the open interval `(lo, hi)` shrunk inward by
/// `pad`; a `true` here survives exact evaluation.
pub fn in_open_interval<T: Real>(x: &T, lo: &T, hi: &T) -> bool {
    let pad = T::pad();
    *x > lo.clone() + pad.clone() && *x < hi.clone() - pad
}
