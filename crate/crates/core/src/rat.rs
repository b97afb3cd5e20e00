//! Exact rational numbers used for every distance, radius and height.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An exact rational backed by a reduced `i64` ratio.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(Ratio<i64>);

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RatError {
    /// A denominator of zero was supplied.
    #[error("zero denominator")]
    ZeroDenominator,
    /// The text could not be read as a rational number.
    #[error("cannot parse `{0}` as a rational number")]
    Parse(String),
}

impl Rat {
    pub const ZERO: Rat = Rat(Ratio::new_raw(0, 1));
    pub const ONE: Rat = Rat(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Rat, RatError> {
        if denom == 0 {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat(Ratio::new(numer, denom)))
    }

    /// Panics on a zero denominator; meant for literals.
    pub fn frac(numer: i64, denom: i64) -> Rat {
        Rat(Ratio::new(numer, denom))
    }

    pub fn int(n: i64) -> Rat {
        Rat(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn half(&self) -> Rat {
        *self / Rat::int(2)
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer()), BigInt::from(self.denom()))
    }

    /// Integer power with a non-negative exponent.
    pub fn pow(&self, exp: u32) -> Rat {
        Rat(self.0.pow(exp as i32))
    }

    pub fn as_pair(&self) -> [i64; 2] {
        [self.numer(), self.denom()]
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = RatError;

    /// Accepts `n`, `n/d` and finite decimals such as `0.25`.
    fn from_str(s: &str) -> Result<Rat, RatError> {
        let t = s.trim();
        let bad = || RatError::Parse(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return Rat::new(n, d);
        }
        if let Some((whole, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
                return Err(bad());
            }
            let negative = whole.trim_start().starts_with('-');
            let w: i64 = if whole.is_empty() || whole == "-" {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            let scale = 10_i64.pow(frac.len() as u32);
            let f: i64 = frac.parse().map_err(|_| bad())?;
            let magnitude = w.abs() * scale + f;
            let numer = if negative { -magnitude } else { magnitude };
            return Rat::new(numer, scale);
        }
        let n: i64 = t.parse().map_err(|_| bad())?;
        Ok(Rat::int(n))
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        Rat(self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::ZERO, |a, b| a + b)
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat::ONE
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        tup.serialize_element(&self.numer())?;
        tup.serialize_element(&self.denom())?;
        tup.end()
    }
}

/// Wire forms accepted for a rational: `[num, den]`, an integer, or a string.
#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Pair(i64, i64),
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rat, D::Error> {
        match RatRepr::deserialize(deserializer)? {
            RatRepr::Pair(n, d) => Rat::new(n, d).map_err(de::Error::custom),
            RatRepr::Int(n) => Ok(Rat::int(n)),
            RatRepr::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// A radius that may be infinite.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Radius {
    Finite(Rat),
    Infinite,
}

impl Radius {
    pub fn finite(&self) -> Option<Rat> {
        match self {
            Radius::Finite(r) => Some(*r),
            Radius::Infinite => None,
        }
    }
}

impl From<Rat> for Radius {
    fn from(r: Rat) -> Radius {
        Radius::Finite(r)
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Radius::Finite(r) => r.serialize(serializer),
            Radius::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Radius, D::Error> {
        match RatRepr::deserialize(deserializer)? {
            RatRepr::Text(s) if s.trim() == "inf" || s.trim() == "infinity" => Ok(Radius::Infinite),
            RatRepr::Pair(n, d) => Rat::new(n, d).map(Radius::Finite).map_err(de::Error::custom),
            RatRepr::Int(n) => Ok(Radius::Finite(Rat::int(n))),
            RatRepr::Text(s) => s.parse().map(Radius::Finite).map_err(de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!("3/2".parse::<Rat>().unwrap(), Rat::frac(3, 2));
        assert_eq!("0.25".parse::<Rat>().unwrap(), Rat::frac(1, 4));
        assert_eq!("-1.5".parse::<Rat>().unwrap(), Rat::frac(-3, 2));
        assert_eq!("7".parse::<Rat>().unwrap(), Rat::int(7));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("abc".parse::<Rat>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = Rat::frac(-5, 6);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "[-5,6]");
        assert_eq!(serde_json::from_str::<Rat>(&s).unwrap(), r);
        assert_eq!(serde_json::from_str::<Rat>("4").unwrap(), Rat::int(4));
        assert_eq!(serde_json::from_str::<Radius>("\"inf\"").unwrap(), Radius::Infinite);
    }

    #[test]
    fn infinite_radius_is_largest() {
        assert!(Radius::Infinite > Radius::Finite(Rat::int(1_000_000)));
    }
}
