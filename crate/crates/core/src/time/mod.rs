//! Exact time values: rationals, extended bounds, intervals and interval sets.

mod interval;
mod set;

pub use interval::{Interval, ParseIntervalError};
pub(crate) use interval::parse_bound;
pub use set::IntervalSet;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Arbitrary precision rational number, always in lowest terms.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{0}`")]
pub struct ParseRationalError(pub String);

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, `p` or a finite decimal such as `-0.25`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let digits = |d: &str| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit());
    let value = if let Some((n, d)) = body.split_once('/') {
        if !digits(n) || !digits(d) {
            return Err(err());
        }
        let den: BigInt = d.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        Rational::new(n.parse().map_err(|_| err())?, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if !(digits(whole) || whole.is_empty()) || !digits(frac) {
            return Err(err());
        }
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let whole: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().map_err(|_| err())? };
        let frac: BigInt = frac.parse().map_err(|_| err())?;
        Rational::new(whole * &scale + frac, scale)
    } else {
        if !digits(body) {
            return Err(err());
        }
        Rational::from_integer(body.parse().map_err(|_| err())?)
    };
    Ok(if neg { -value } else { value })
}

/// `max(a - b, 0)`.
pub fn monus(a: &Rational, b: &Rational) -> Rational {
    let d = a - b;
    if d.is_negative() {
        Rational::zero()
    } else {
        d
    }
}

/// Number of binary digits of `|n|`; zero takes one digit.
pub fn bit_length(n: &BigInt) -> u64 {
    n.bits().max(1)
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// A time value extended with both infinities.
///
/// Variant order gives `NegInf < Finite(_) < PosInf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeBound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl TimeBound {
    pub fn zero() -> TimeBound {
        TimeBound::Finite(Rational::zero())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TimeBound::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TimeBound::Finite(_))
    }

    pub fn neg(&self) -> TimeBound {
        match self {
            TimeBound::NegInf => TimeBound::PosInf,
            TimeBound::PosInf => TimeBound::NegInf,
            TimeBound::Finite(r) => TimeBound::Finite(-r),
        }
    }

    /// Sum of two bounds. Opposite infinities have no sum.
    pub fn add(&self, other: &TimeBound) -> Option<TimeBound> {
        use TimeBound::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
        }
    }

    pub fn sub(&self, other: &TimeBound) -> Option<TimeBound> {
        self.add(&other.neg())
    }

    pub fn shift(&self, r: &Rational) -> TimeBound {
        match self {
            TimeBound::Finite(x) => TimeBound::Finite(x + r),
            other => other.clone(),
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        match self {
            TimeBound::NegInf => Ordering::Less,
            TimeBound::PosInf => Ordering::Greater,
            TimeBound::Finite(x) => x.cmp(r),
        }
    }
}

impl From<Rational> for TimeBound {
    fn from(r: Rational) -> Self {
        TimeBound::Finite(r)
    }
}

impl fmt::Display for TimeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeBound::NegInf => f.write_str("-inf"),
            TimeBound::PosInf => f.write_str("inf"),
            TimeBound::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Serde helpers that store rationals as strings.
pub mod serde_rational {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    /// Accepts a string such as `"3/2"` or a plain JSON number.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(t) => t,
            Raw::Int(n) => n.to_string(),
            Raw::Float(x) => x.to_string(),
        };
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.collect_str(r),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&r.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_rational_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.01").unwrap(), rat(1, 100));
        assert_eq!(parse_rational("5.1").unwrap(), rat(51, 10));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        for bad in ["", "1/0", "a", "1.", "1/-2", "--1", "1.2.3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn monus_clamps_at_zero() {
        assert_eq!(monus(&int(5), &int(3)), int(2));
        assert_eq!(monus(&int(1), &int(4)), int(0));
        assert_eq!(monus(&rat(7, 3), &rat(7, 3)), int(0));
    }

    #[test]
    fn bound_order() {
        assert!(TimeBound::NegInf < TimeBound::Finite(int(-100)));
        assert!(TimeBound::Finite(int(100)) < TimeBound::PosInf);
        assert!(TimeBound::Finite(rat(1, 3)) < TimeBound::Finite(rat(1, 2)));
    }

    #[test]
    fn bit_lengths() {
        assert_eq!(bit_length(&BigInt::from(0)), 1);
        assert_eq!(bit_length(&BigInt::from(100)), 7);
        assert_eq!(bit_length(&BigInt::from(-2)), 2);
    }
}
