//! Exact rational numbers used wherever theorem conditions must be decided
//! without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse `{0}` as a rational (expected `num/den`, an integer or a finite decimal)")]
    Parse(String),
    #[error("value {0} is not exactly representable as a rational")]
    NotExact(f64),
}

/// A rational number kept in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Result<Self, RationalError> {
        if denom == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    /// Panicking constructor for literals in code and tests.
    pub fn frac(numer: i128, denom: i128) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn int(value: i128) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
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

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> i128 {
        Integer::div_floor(&self.numer(), &self.denom())
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> i128 {
        -Integer::div_floor(&-self.numer(), &self.denom())
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Exact conversion of a binary float that happens to be a short decimal
    /// (e.g. `1.1` becomes `11/10`). Values that are not a decimal with at
    /// most 12 fractional digits are rejected.
    pub fn from_decimal_f64(value: f64) -> Result<Self, RationalError> {
        if !value.is_finite() {
            return Err(RationalError::NotExact(value));
        }
        let text = format!("{value}");
        text.parse().map_err(|_| RationalError::NotExact(value))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RationalError::Parse(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i128 = num.trim().parse().map_err(|_| bad())?;
            let den: i128 = den.trim().parse().map_err(|_| bad())?;
            return Rational::new(num, den);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || frac_part.len() > 18 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int_part.trim_start().starts_with('-');
            let int_digits = int_part.trim_start_matches(['-', '+']);
            let whole: i128 = if int_digits.is_empty() {
                0
            } else {
                int_digits.parse().map_err(|_| bad())?
            };
            let scale = 10i128.pow(frac_part.len() as u32);
            let frac: i128 = frac_part.parse().map_err(|_| bad())?;
            let magnitude = whole * scale + frac;
            let numer = if negative { -magnitude } else { magnitude };
            return Rational::new(numer, scale);
        }
        s.parse::<i128>().map(Rational::int).map_err(|_| bad())
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<i128> for Rational {
            type Output = Rational;
            fn $method(self, rhs: i128) -> Rational {
                Rational($trait::$method(self.0, Ratio::from_integer(rhs)))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i128> for Rational {
    fn from(value: i128) -> Self {
        Rational::int(value)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(i) => Ok(Rational::int(i as i128)),
            Repr::Float(x) => Rational::from_decimal_f64(x).map_err(serde::de::Error::custom),
        }
    }
}
