//! Exact arithmetic on the unit interval `[0,1]`.
//!
//! Every probability, fuzzy degree, threshold and distance in this crate is a
//! [`Value`]: an arbitrary-precision rational clamped to `[0,1]` by
//! construction. Strict inequalities in the game are decided on these exact
//! values, never on floats.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("malformed value literal `{0}`")]
    Malformed(String),
    #[error("value `{0}` lies outside [0,1]")]
    OutOfRange(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// A reduced rational number `p/q` with `0 <= p/q <= 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(BigRational);

impl Value {
    pub fn zero() -> Self {
        Value(BigRational::zero())
    }

    pub fn one() -> Self {
        Value(BigRational::one())
    }

    /// Builds `numerator/denominator`, rejecting anything outside `[0,1]`.
    pub fn new(numerator: i64, denominator: i64) -> Result<Self, ValueError> {
        if denominator == 0 {
            return Err(ValueError::ZeroDenominator(format!("{numerator}/{denominator}")));
        }
        Self::from_ratio(BigRational::new(numerator.into(), denominator.into()))
    }

    /// Wraps an arbitrary rational, checking the range.
    pub fn from_ratio(r: BigRational) -> Result<Self, ValueError> {
        if r.is_negative() || r > BigRational::one() {
            return Err(ValueError::OutOfRange(r.to_string()));
        }
        Ok(Value(r))
    }

    /// Clamps an arbitrary rational into `[0,1]`.
    pub fn clamp_ratio(r: BigRational) -> Self {
        if r.is_negative() {
            Value::zero()
        } else if r > BigRational::one() {
            Value::one()
        } else {
            Value(r)
        }
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `1 - self`.
    pub fn complement(&self) -> Value {
        Value(BigRational::one() - &self.0)
    }

    /// `(self + other) / 2`.
    pub fn midpoint(&self, other: &Value) -> Value {
        Value((&self.0 + &other.0) / BigRational::from_integer(2.into()))
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

/// `min(a + b, 1)`.
pub fn truncated_add(a: &Value, b: &Value) -> Value {
    let s = &a.0 + &b.0;
    if s > BigRational::one() {
        Value::one()
    } else {
        Value(s)
    }
}

/// `max(a - b, 0)`.
pub fn truncated_sub(a: &Value, b: &Value) -> Value {
    if a.0 <= b.0 {
        Value::zero()
    } else {
        Value(&a.0 - &b.0)
    }
}

pub fn meet(a: &Value, b: &Value) -> Value {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn join(a: &Value, b: &Value) -> Value {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Decides `low < high - eps` over the reals (no truncation).
pub fn below_by_more_than(low: &Value, high: &Value, eps: &Value) -> bool {
    &low.0 + &eps.0 < high.0
}

/// Sum of values as an unbounded rational.
pub fn exact_sum<'a>(values: impl IntoIterator<Item = &'a Value>) -> BigRational {
    values
        .into_iter()
        .fold(BigRational::zero(), |acc, v| acc + &v.0)
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_uint(s: &str, whole: &str) -> Result<BigInt, ValueError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ValueError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ValueError::Malformed(whole.to_string()))
}

impl FromStr for Value {
    type Err = ValueError;

    /// Accepts `p/q`, plain integers and finite decimals (`0.9` is `9/10`).
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let ratio = if let Some((p, q)) = body.split_once('/') {
            let p = parse_uint(p.trim(), text)?;
            let q = parse_uint(q.trim(), text)?;
            if q.is_zero() {
                return Err(ValueError::ZeroDenominator(text.to_string()));
            }
            BigRational::new(p, q)
        } else if let Some((int, frac)) = body.split_once('.') {
            let int = if int.is_empty() {
                BigInt::zero()
            } else {
                parse_uint(int, text)?
            };
            let digits = parse_uint(frac, text)?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            BigRational::new(int * &scale + digits, scale)
        } else {
            BigRational::from_integer(parse_uint(body, text)?)
        };
        let ratio = if negative { -ratio } else { ratio };
        Value::from_ratio(ratio).map_err(|_| ValueError::OutOfRange(text.to_string()))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
