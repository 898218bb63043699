//! Fixed-point big reals: value = mantissa / 2^FRAC with an arbitrary-size
//! integer mantissa.
//!
//! Addition, subtraction, comparison, floor and fractional part are exact;
//! multiplication, division and the transcendental kernels round once per
//! operation (at most one unit in the last place, plus the argument
//! reduction slack in `sin`). `FRAC` includes 48 guard bits beyond the
//! advertised working precision, and [`Fix::pad`] returns the conservative
//! slack `2^-(FRAC-48)` that dominates every rounding chain this crate
//! evaluates.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Guard bits between the mantissa tail and the advertised precision.
pub const GUARD_BITS: u32 = 48;

#[derive(Clone, PartialEq, Eq)]
pub struct Fix<const FRAC: u32> {
    mant: BigInt,
}

impl<const FRAC: u32> Fix<FRAC> {
    pub fn from_mant(mant: BigInt) -> Self {
        Fix { mant }
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn from_int(n: i64) -> Self {
        Fix {
            mant: BigInt::from(n) << FRAC,
        }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Fix { mant: n.clone() << FRAC }
    }

    /// `num/den` rounded toward zero at the last place; `den != 0`.
    pub fn from_big_ratio(num: &BigInt, den: &BigInt) -> Self {
        assert!(!den.is_zero(), "from_big_ratio with zero denominator");
        Fix {
            mant: (num.clone() << FRAC) / den,
        }
    }

    /// Parses a plain decimal literal like `-12.0625` or `0.41421`.
    pub fn from_decimal_str(s: &str) -> Option<Self> {
        let s = s.trim();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let digits: String = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let v = Self::from_big_ratio(&num, &den);
        Some(if sign < 0 { -v } else { v })
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        Fix {
            mant: self.mant.abs(),
        }
    }

    /// Exact floor.
    pub fn floor_int(&self) -> BigInt {
        self.mant.div_floor(&(BigInt::one() << FRAC))
    }

    /// Exact fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        Fix {
            mant: self.mant.mod_floor(&(BigInt::one() << FRAC)),
        }
    }

    /// Multiplication by a natural, exact.
    pub fn mul_nat(&self, n: u64) -> Self {
        Fix {
            mant: &self.mant * BigInt::from(n),
        }
    }

    /// Division, rounded toward zero at the last place; `o != 0`.
    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.mant.is_zero(), "division by exact zero");
        Fix {
            mant: (self.mant.clone() << FRAC) / &o.mant,
        }
    }

    pub fn recip(&self) -> Self {
        Self::from_int(1).div(self)
    }

    /// Floor square root of a natural, correct to the last place.
    pub fn sqrt_nat(n: u64) -> Self {
        let shifted: BigInt = BigInt::from(n) << (2 * FRAC);
        Fix {
            mant: shifted.sqrt(),
        }
    }

    /// Pi, computed once per precision by Machin's arctangent formula with
    /// extra internal guard bits.
    pub fn pi() -> Self {
        static CACHE: OnceLock<Mutex<HashMap<u32, BigInt>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        let mant = map
            .entry(FRAC)
            .or_insert_with(|| {
                let work = FRAC + 32;
                // pi = 16 arctan(1/5) - 4 arctan(1/239)
                let a = arctan_inv(5, work);
                let b = arctan_inv(239, work);
                let pi_work = a * 16 - b * 4;
                pi_work >> 32
            })
            .clone();
        Fix { mant }
    }

    /// Sine. The argument is reduced modulo 2*pi, then summed by the
    /// alternating Taylor series on `[-pi, pi]`.
    pub fn sin(&self) -> Self {
        let two_pi = {
            let p = Self::pi();
            Fix { mant: p.mant << 1 }
        };
        let k = self.div(&two_pi).floor_int();
        let mut y = self.clone() - Fix { mant: &two_pi.mant * &k };
        let pi = Self::pi();
        // Reduction rounding can leave y a hair outside [0, 2pi); nudge.
        while y > pi {
            y = y - two_pi.clone();
        }
        let minus_pi = -pi.clone();
        while y < minus_pi {
            y = y + two_pi.clone();
        }
        let y2 = y.clone() * y.clone();
        let mut term = y.clone();
        let mut acc = y;
        let mut j: u64 = 0;
        while !term.mant.is_zero() && j < 200 {
            // term *= -y^2 / ((2j+2)(2j+3))
            term = term * y2.clone();
            let d = BigInt::from((2 * j + 2) * (2 * j + 3));
            term = Fix {
                mant: -(term.mant / d),
            };
            acc = acc + term.clone();
            j += 1;
        }
        acc
    }

    /// Conservative slack dominating accumulated rounding error:
    /// one unit at the advertised working precision, `2^-(FRAC-48)`.
    pub fn pad() -> Self {
        Fix {
            mant: BigInt::one() << GUARD_BITS,
        }
    }

    /// Decimal rendering with the given number of fractional digits,
    /// truncated toward zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.mant.is_negative();
        let a = self.mant.abs();
        let int = a.div_floor(&(BigInt::one() << FRAC));
        let frac = a.mod_floor(&(BigInt::one() << FRAC));
        let scaled = (frac * BigInt::from(10u32).pow(digits as u32)) >> FRAC;
        let mut s = scaled.to_string();
        if s.len() < digits {
            s = format!("{}{}", "0".repeat(digits - s.len()), s);
        }
        format!("{}{}.{}", if neg { "-" } else { "" }, int, s)
    }

    pub fn to_f64(&self) -> f64 {
        // Split to keep precision for large mantissas.
        let int = self.floor_int();
        let frac = self.fract();
        let frac_f = ((frac.mant << 64u32) >> FRAC).to_f64().unwrap_or(0.0) / 2f64.powi(64);
        int.to_f64().unwrap_or(f64::NAN) + frac_f
    }
}

/// arctan(1/k) * 2^bits, truncated.
fn arctan_inv(k: u32, bits: u32) -> BigInt {
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut term = (BigInt::one() << bits) / BigInt::from(k);
    let mut acc = term.clone();
    let mut n: u64 = 1;
    while !term.is_zero() {
        term /= &k2;
        if term.is_zero() {
            break;
        }
        let denom = BigInt::from(2 * n + 1);
        let contrib = &term / denom;
        if n % 2 == 1 {
            acc -= contrib;
        } else {
            acc += contrib;
        }
        n += 1;
    }
    acc
}

impl<const FRAC: u32> Add for Fix<FRAC> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fix {
            mant: self.mant + o.mant,
        }
    }
}

impl<const FRAC: u32> Sub for Fix<FRAC> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fix {
            mant: self.mant - o.mant,
        }
    }
}

impl<const FRAC: u32> Mul for Fix<FRAC> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fix {
            mant: (self.mant * o.mant) >> FRAC,
        }
    }
}

impl<const FRAC: u32> Neg for Fix<FRAC> {
    type Output = Self;
    fn neg(self) -> Self {
        Fix { mant: -self.mant }
    }
}

impl<const FRAC: u32> Zero for Fix<FRAC> {
    fn zero() -> Self {
        Fix {
            mant: BigInt::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }
}

impl<const FRAC: u32> One for Fix<FRAC> {
    fn one() -> Self {
        Fix {
            mant: BigInt::one() << FRAC,
        }
    }
}

impl<const FRAC: u32> PartialOrd for Fix<FRAC> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.mant.cmp(&o.mant))
    }
}

impl<const FRAC: u32> fmt::Debug for Fix<FRAC> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fix<{}>({})", FRAC, self.to_decimal(30))
    }
}

impl<const FRAC: u32> fmt::Display for Fix<FRAC> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(((FRAC - GUARD_BITS) as f64 * 0.301) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = Fix<304>;

    #[test]
    fn floor_and_fract_are_exact() {
        let x = F::from_big_ratio(&BigInt::from(11), &BigInt::from(4)); // 2.75
        assert_eq!(x.floor_int(), BigInt::from(2));
        assert_eq!(x.fract(), F::from_big_ratio(&BigInt::from(3), &BigInt::from(4)));

        let y = F::from_big_ratio(&BigInt::from(-1), &BigInt::from(4)); // -0.25
        assert_eq!(y.floor_int(), BigInt::from(-1));
        assert_eq!(y.fract(), F::from_big_ratio(&BigInt::from(3), &BigInt::from(4)));
    }

    #[test]
    fn sqrt_two_squares_back() {
        let r = F::sqrt_nat(2);
        let sq = r.clone() * r.clone();
        let err = (sq - F::from_int(2)).abs();
        assert!(err < F::pad(), "sqrt(2)^2 off by {}", err.to_decimal(80));
    }

    #[test]
    fn pi_matches_reference_digits() {
        let p = F::pi();
        let s = p.to_decimal(50);
        assert!(
            s.starts_with("3.14159265358979323846264338327950288419716939937510"),
            "pi = {s}"
        );
    }

    #[test]
    fn sin_reference_values() {
        // sin(1) to 40 digits.
        let s1 = F::from_int(1).sin().to_decimal(40);
        assert!(
            s1.starts_with("0.8414709848078965066525023216302989996225"),
            "sin 1 = {s1}"
        );
        // sin(pi) ~ 0 within pad.
        let sp = F::pi().sin().abs();
        assert!(sp < F::pad());
        // sin(-x) = -sin(x) within pad.
        let a = F::from_big_ratio(&BigInt::from(7), &BigInt::from(3));
        let d = (a.clone().sin() + (-a).sin()).abs();
        assert!(d < F::pad());
        // Large-argument reduction: sin(1000) to 20 digits.
        let s1000 = F::from_int(1000).sin().to_decimal(20);
        assert!(s1000.starts_with("0.82687954053200256025"), "sin 1000 = {s1000}");
    }

    #[test]
    fn decimal_string_roundtrip() {
        let x = F::from_decimal_str("-12.0625").unwrap();
        assert_eq!(x, F::from_big_ratio(&BigInt::from(-193), &BigInt::from(16)));
        assert!(x.to_decimal(4).starts_with("-12.0625"));
        assert!(F::from_decimal_str("nonsense").is_none());
    }
}
