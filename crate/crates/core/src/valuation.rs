//! Exact rational valuations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A rational valuation such as `m0 = v(q - 1)`, normalized so that `v(p) = 1`.
///
/// Rendered as `"a/b"` (always with a denominator) in every external format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValuationQ(Ratio<i64>);

impl ValuationQ {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "valuation with zero denominator");
        ValuationQ(Ratio::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        ValuationQ(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    /// `units` multiples of `1/e`.
    pub fn from_units(units: i64, e: u32) -> Self {
        Self::new(units, e as i64)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// Exact count of `1/e` units, if the valuation is representable with ramification `e`.
    pub fn to_units(&self, e: u32) -> Option<i64> {
        let scaled = self.0 * Ratio::from_integer(e as i64);
        scaled.is_integer().then(|| scaled.to_integer())
    }

    /// Smallest unit count `n` with `n / e >= self`.
    pub fn ceil_units(&self, e: u32) -> i64 {
        let scaled = self.0 * Ratio::from_integer(e as i64);
        scaled.numer().div_ceil(scaled.denom())
    }

    /// Largest unit count `n` with `n / e <= self`.
    pub fn floor_units(&self, e: u32) -> i64 {
        let scaled = self.0 * Ratio::from_integer(e as i64);
        scaled.numer().div_floor(scaled.denom())
    }

    /// `1/(p-1)`, the radius exponent of the disk S.
    pub fn s_radius(p: u32) -> Self {
        Self::new(1, p as i64 - 1)
    }

    pub fn as_ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for ValuationQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for ValuationQ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid valuation `{s}`"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d <= 0 {
            return Err(bad());
        }
        Ok(ValuationQ::new(n, d))
    }
}

impl Serialize for ValuationQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ValuationQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for ValuationQ {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ValuationQ(self.0 + o.0)
    }
}

impl Sub for ValuationQ {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ValuationQ(self.0 - o.0)
    }
}

impl Neg for ValuationQ {
    type Output = Self;
    fn neg(self) -> Self {
        ValuationQ(-self.0)
    }
}

impl Mul<i64> for ValuationQ {
    type Output = Self;
    fn mul(self, k: i64) -> Self {
        ValuationQ(self.0 * Ratio::from_integer(k))
    }
}

impl Mul for ValuationQ {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        ValuationQ(self.0 * o.0)
    }
}

/// Valuation of a p-adic number as observed at finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(ValuationQ),
    /// Indistinguishable from zero; the true valuation is at least the bound.
    Infinite(ValuationQ),
}

impl Valuation {
    pub fn finite(&self) -> Option<ValuationQ> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite(_) => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite(_))
    }

    /// A lower bound that holds in both cases.
    pub fn lower_bound(&self) -> ValuationQ {
        match self {
            Valuation::Finite(v) | Valuation::Infinite(v) => *v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite(v) => write!(f, ">={v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_round_trip() {
        let v = ValuationQ::new(3, 10);
        assert_eq!(v.to_units(10), Some(3));
        assert_eq!(v.to_units(5), None);
        assert_eq!(v.ceil_units(5), 2);
        assert_eq!(v.floor_units(5), 1);
        assert_eq!(ValuationQ::new(-1, 3).floor_units(1), -1);
        assert_eq!(ValuationQ::new(-1, 3).ceil_units(1), 0);
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(ValuationQ::integer(2).to_string(), "2/1");
        assert_eq!("6/4".parse::<ValuationQ>().unwrap(), ValuationQ::new(3, 2));
        assert_eq!("-2".parse::<ValuationQ>().unwrap(), ValuationQ::integer(-2));
        assert!("1/0".parse::<ValuationQ>().is_err());
        assert!("x".parse::<ValuationQ>().is_err());
    }

    #[test]
    fn ordering_is_exact() {
        assert!(ValuationQ::new(1, 3) > ValuationQ::s_radius(5));
        assert!(ValuationQ::new(1, 2) == ValuationQ::s_radius(3));
    }
}
