//! Numeric field abstraction shared by the exact and floating-point modes.
//!
//! Every identity in this crate is stated over the rationals. `Rational`
//! (arbitrary precision) gives the exact mode; `f64` gives the float mode,
//! where zero tests become relative tolerance tests.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// A field element usable by all matrix and graph routines.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for exact arithmetic.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Nearest representable value for a float. Exact types convert the
    /// float's shortest decimal representation.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// `self^exponent`, or `None` when the power is not representable
    /// (non-integer exponent in exact mode).
    fn try_pow(&self, exponent: &Self) -> Option<Self>;

    /// Zero test with a relative tolerance against `scale`. Exact types
    /// ignore both and test for zero.
    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    /// Integer value, when `self` is an integer.
    fn as_integer(&self) -> Option<i64>;

    /// Exact rational value; floats go through their shortest decimal.
    fn to_rational(&self) -> Option<Rational>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn try_pow(&self, exponent: &Self) -> Option<Self> {
        if exponent.fract() == 0.0 && f64::abs(*exponent) < i32::MAX as f64 {
            Some(self.powi(*exponent as i32))
        } else {
            Some(self.powf(*exponent))
        }
    }

    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool {
        f64::abs(*self) <= rel_tol * scale
    }

    fn as_integer(&self) -> Option<i64> {
        (self.fract() == 0.0 && f64::abs(*self) < 9.0e15).then_some(*self as i64)
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_f64(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        parse_decimal(&format!("{v}"))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn try_pow(&self, exponent: &Self) -> Option<Self> {
        if !exponent.is_integer() {
            return None;
        }
        let e = exponent.to_integer().to_i32()?;
        if self.is_zero() && e < 0 {
            return None;
        }
        Some(num_traits::Pow::pow(self, e))
    }

    fn is_negligible(&self, _scale: f64, _rel_tol: f64) -> bool {
        self.is_zero()
    }

    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.to_integer().to_i64()
        } else {
            None
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

/// Parses a decimal literal (`"-12"`, `"0.125"`, `"3e-2"`, `"7/9"`) exactly.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Scales a rational vector to the primitive integer vector with the same
/// direction (common denominators cleared, common factor removed).
pub fn primitive_direction(v: &[Rational]) -> Vec<Rational> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

/// Maximum absolute entry as a float.
pub fn max_abs<T: Scalar>(values: &[T]) -> f64 {
    values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}
