//! Numbers that remember whether they are exact.
//!
//! Configuration values written as integers or `"p/q"` strings are kept as
//! exact rationals alongside their `f64` image, so derived constants can be
//! reported as exact fractions. Anything touched by a float collapses to
//! float-only.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Rational = BigRational;

/// Field operations shared by the `f64` and exact-rational code paths.
pub trait Scalar:
    Clone + PartialOrd + Num + Neg<Output = Self> + fmt::Debug + fmt::Display
{
    fn from_int(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// True for types whose arithmetic is exact (comparisons need no slack).
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Tolerance applied to strict float inequalities (`lhs < rhs`).
pub const FLOAT_STRICT_TOL: f64 = 1e-12;

/// `lhs < rhs`, exactly for rationals and with `FLOAT_STRICT_TOL` slack
/// (scaled by `max(1, |rhs|)`) for floats.
pub fn strictly_less<S: Scalar>(lhs: &S, rhs: &S) -> bool {
    if S::is_exact() {
        lhs < rhs
    } else {
        let (l, r) = (lhs.to_f64(), rhs.to_f64());
        r - l > FLOAT_STRICT_TOL * r.abs().max(1.0)
    }
}

/// `lhs <= rhs`, with the same float slack in the permissive direction.
pub fn less_or_equal<S: Scalar>(lhs: &S, rhs: &S) -> bool {
    if S::is_exact() {
        lhs <= rhs
    } else {
        let (l, r) = (lhs.to_f64(), rhs.to_f64());
        l - r <= FLOAT_STRICT_TOL * r.abs().max(1.0)
    }
}

/// A real value with an optional exact rational representation.
#[derive(Clone, Debug)]
pub struct Number {
    value: f64,
    exact: Option<Rational>,
}

impl Number {
    pub fn float(value: f64) -> Self {
        Number { value, exact: None }
    }

    pub fn exact(r: Rational) -> Self {
        Number {
            value: Scalar::to_f64(&r),
            exact: Some(r),
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Number::exact(Rational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(n: i64) -> Self {
        Number::ratio(n, 1)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Drops the exact representation.
    pub fn to_float(&self) -> Number {
        Number::float(self.value)
    }

    /// Exact rendering (`"p/q"` or `"p"`) when available.
    pub fn exact_string(&self) -> Option<String> {
        self.exact.as_ref().map(|r| r.to_string())
    }

    fn combine(
        &self,
        other: &Number,
        exact: impl FnOnce(&Rational, &Rational) -> Option<Rational>,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Number {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => match exact(a, b) {
                Some(r) => Number::exact(r),
                None => Number::float(float(self.value, other.value)),
            },
            _ => Number::float(float(self.value, other.value)),
        }
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.value.to_bits() == other.value.to_bits(),
            _ => false,
        }
    }
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        Number::float(v)
    }
}

impl From<Rational> for Number {
    fn from(r: Rational) -> Self {
        Number::exact(r)
    }
}

impl<'a> Add for &'a Number {
    type Output = Number;
    fn add(self, rhs: &'a Number) -> Number {
        self.combine(rhs, |a, b| Some(a + b), |a, b| a + b)
    }
}

impl<'a> Sub for &'a Number {
    type Output = Number;
    fn sub(self, rhs: &'a Number) -> Number {
        self.combine(rhs, |a, b| Some(a - b), |a, b| a - b)
    }
}

impl<'a> Mul for &'a Number {
    type Output = Number;
    fn mul(self, rhs: &'a Number) -> Number {
        self.combine(rhs, |a, b| Some(a * b), |a, b| a * b)
    }
}

impl<'a> Div for &'a Number {
    type Output = Number;
    fn div(self, rhs: &'a Number) -> Number {
        self.combine(
            rhs,
            |a, b| (!b.is_zero()).then(|| a / b),
            |a, b| a / b,
        )
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}", self.value),
        }
    }
}

/// Parses `"p/q"`, `"p"`, or a decimal literal such as `"0.25"` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let err = || Error::Number(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(n));
    }
    // Plain decimal: digits with one point, optional sign, no exponent.
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').ok_or_else(err)?;
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|_| err())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if negative { -r } else { r })
}

impl FromStr for Number {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Number::exact)
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.exact {
            // Integers go out as JSON integers so that documents round-trip.
            Some(r) if r.is_integer() => match r.to_integer().to_i64() {
                Some(i) => serializer.serialize_i64(i),
                None => serializer.serialize_str(&r.to_string()),
            },
            Some(r) => serializer.serialize_str(&r.to_string()),
            None => serializer.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NumberVisitor;

        impl Visitor<'_> for NumberVisitor {
            type Value = Number;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a rational string such as \"1/3\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Number, E> {
                Ok(Number::integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Number, E> {
                Ok(Number::exact(Rational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Number, E> {
                Ok(Number::float(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Number, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(NumberVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), Rational::new(1.into(), 3.into()));
        assert_eq!(parse_rational(" -4 ").unwrap(), Rational::from_integer((-4).into()));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-.5").unwrap(), Rational::new((-1).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational(".").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn arithmetic_stays_exact_until_a_float_enters() {
        let third = Number::ratio(1, 3);
        let sum = &third + &third;
        assert_eq!(sum.exact_string().as_deref(), Some("2/3"));
        let mixed = &third + &Number::float(0.5);
        assert!(!mixed.is_exact());
        assert!((mixed.value() - (1.0 / 3.0 + 0.5)).abs() < 1e-15);
        let by_zero = &third / &Number::integer(0);
        assert!(!by_zero.is_exact() && by_zero.value().is_infinite());
    }

    #[test]
    fn json_forms() {
        let n: Number = serde_json::from_str("\"1/120\"").unwrap();
        assert_eq!(n, Number::ratio(1, 120));
        let n: Number = serde_json::from_str("3").unwrap();
        assert_eq!(n, Number::integer(3));
        let n: Number = serde_json::from_str("0.1").unwrap();
        assert!(!n.is_exact());
        assert_eq!(serde_json::to_string(&Number::ratio(4, 45)).unwrap(), "\"4/45\"");
        assert_eq!(serde_json::to_string(&Number::float(0.1)).unwrap(), "0.1");
    }

    #[test]
    fn strict_float_comparison_has_slack() {
        assert!(!strictly_less(&8.0, &8.0));
        assert!(!strictly_less(&(8.0 - 1e-13), &8.0));
        assert!(strictly_less(&7.9, &8.0));
        let a = Rational::from_int(8);
        assert!(!strictly_less(&a, &a));
        assert!(less_or_equal(&a, &a));
    }
}
