//! Exact distance values.
//!
//! Every distance in the crate is an exact rational. Spaces whose inputs were
//! floating point keep the exact binary-to-decimal conversion of the input and
//! declare a float [`Arithmetic`](crate::space::Arithmetic) mode, which only
//! changes how distance levels are grouped.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

/// A nonnegative (by convention) exact rational distance.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Dist(BigRational);

impl Dist {
    pub fn zero() -> Self {
        Dist(BigRational::zero())
    }

    pub fn one() -> Self {
        Dist(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Dist(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_u64(n: u64) -> Self {
        Dist(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Dist(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Dist(r)
    }

    /// Exact value of the shortest decimal representation of `x`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        format!("{x}").parse().ok()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
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

    pub fn abs_diff(&self, other: &Dist) -> Dist {
        Dist((&self.0 - &other.0).abs())
    }

    pub fn double(&self) -> Dist {
        Dist(&self.0 + &self.0)
    }

    pub fn square(&self) -> Dist {
        Dist(&self.0 * &self.0)
    }

    pub fn half(&self) -> Dist {
        Dist(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    /// Largest integer `e` with `2^e <= self`. `None` for nonpositive values.
    pub fn floor_log2(&self) -> Option<i64> {
        if !self.is_positive() {
            return None;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        // float guess, then exact correction
        let mut e = self.to_f64().log2().floor() as i64;
        let pow = |e: i64| -> BigRational {
            if e >= 0 {
                num_traits::pow(two.clone(), e as usize)
            } else {
                num_traits::pow(two.clone(), (-e) as usize).recip()
            }
        };
        while pow(e) > self.0 {
            e -= 1;
        }
        while pow(e + 1) <= self.0 {
            e += 1;
        }
        Some(e)
    }

    /// Exact test for `self == 2^e`.
    pub fn is_power_of_two(&self, e: i64) -> bool {
        let two = BigRational::from_integer(BigInt::from(2));
        let p = if e >= 0 { num_traits::pow(two, e as usize) } else { num_traits::pow(two, (-e) as usize).recip() };
        p == self.0
    }

    pub fn pow2(e: i64) -> Dist {
        let two = BigRational::from_integer(BigInt::from(2));
        if e >= 0 {
            Dist(num_traits::pow(two, e as usize))
        } else {
            Dist(num_traits::pow(two, (-e) as usize).recip())
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dist {
    type Err = ParseError;

    /// Accepts integers, `p/q` fractions and decimals (optionally with an
    /// exponent). Decimals are converted exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseError::Number(s.to_string());
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Dist(BigRational::new(n, d)));
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (negative, mantissa) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
        let scale = exponent - frac_part.len() as i64;
        let ten = BigRational::from_integer(BigInt::from(10));
        if scale >= 0 {
            value *= num_traits::pow(ten, scale as usize);
        } else {
            value /= num_traits::pow(ten, (-scale) as usize);
        }
        if negative {
            value = -value;
        }
        Ok(Dist(value))
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Number(x) => Dist::from_f64(x).ok_or_else(|| serde::de::Error::custom("non-finite distance")),
        }
    }
}

impl Add for Dist {
    type Output = Dist;
    fn add(self, rhs: Dist) -> Dist {
        Dist(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Dist> for &'a Dist {
    type Output = Dist;
    fn add(self, rhs: &Dist) -> Dist {
        Dist(&self.0 + &rhs.0)
    }
}

impl Sub for Dist {
    type Output = Dist;
    fn sub(self, rhs: Dist) -> Dist {
        Dist(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a Dist> for &'a Dist {
    type Output = Dist;
    fn sub(self, rhs: &Dist) -> Dist {
        Dist(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a Dist> for &'a Dist {
    type Output = Dist;
    fn mul(self, rhs: &Dist) -> Dist {
        Dist(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for Dist {
    fn sum<I: Iterator<Item = Dist>>(iter: I) -> Dist {
        iter.fold(Dist::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("7/3".parse::<Dist>().unwrap(), Dist::ratio(7, 3));
        assert_eq!("0.125".parse::<Dist>().unwrap(), Dist::ratio(1, 8));
        assert_eq!("1.5e2".parse::<Dist>().unwrap(), Dist::from_int(150));
        assert_eq!("25e-2".parse::<Dist>().unwrap(), Dist::ratio(1, 4));
        assert_eq!("-2".parse::<Dist>().unwrap(), Dist::from_int(-2));
        assert!("1/0".parse::<Dist>().is_err());
        assert!("abc".parse::<Dist>().is_err());
        assert!(".".parse::<Dist>().is_err());
    }

    #[test]
    fn float_conversion_uses_shortest_decimal() {
        assert_eq!(Dist::from_f64(0.1).unwrap(), Dist::ratio(1, 10));
        assert!(Dist::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn display_round_trips() {
        for d in [Dist::ratio(47, 60), Dist::from_int(11), Dist::zero()] {
            assert_eq!(d.to_string().parse::<Dist>().unwrap(), d);
        }
    }

    #[test]
    fn floor_log2_exact() {
        assert_eq!(Dist::from_int(1).floor_log2(), Some(0));
        assert_eq!(Dist::from_int(8).floor_log2(), Some(3));
        assert_eq!(Dist::from_int(15).floor_log2(), Some(3));
        assert_eq!(Dist::ratio(1, 2).floor_log2(), Some(-1));
        assert_eq!(Dist::ratio(1, 3).floor_log2(), Some(-2));
        assert_eq!(Dist::zero().floor_log2(), None);
        assert!(Dist::from_int(8).is_power_of_two(3));
        assert!(!Dist::from_int(9).is_power_of_two(3));
    }
}
