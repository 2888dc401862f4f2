use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::time::{parse_bound, Interval, Rational, TimeBound};

/// An interval kept as its raw endpoint record. Unlike [`Interval`] it is not
/// normalized, so `(v,v]` stays distinct from `(0,0)`: its left closure
/// `[v,v]` is non-empty and its supremum is `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    lo: Rational,
    lo_closed: bool,
    hi: TimeBound,
    hi_closed: bool,
}

impl Span {
    pub fn new(lo: Rational, lo_closed: bool, hi: TimeBound, hi_closed: bool) -> Span {
        let hi_closed = hi_closed && hi.is_finite();
        Span { lo, lo_closed, hi, hi_closed }
    }

    pub fn from_interval(i: &Interval) -> Option<Span> {
        let lo = i.lo().finite()?.clone();
        Some(Span::new(lo, i.lo_closed(), i.hi().clone(), i.hi_closed()))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &TimeBound {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    /// The points of the span.
    pub fn set(&self) -> Interval {
        Interval::new(self.lo.clone().into(), self.lo_closed, self.hi.clone(), self.hi_closed)
    }

    /// `[lo, hi⟩`
    pub fn close_left(&self) -> Interval {
        Interval::new(self.lo.clone().into(), true, self.hi.clone(), self.hi_closed)
    }

    /// `⟨lo, inf)`
    pub fn up_closure(&self) -> Interval {
        Interval::new(self.lo.clone().into(), self.lo_closed, TimeBound::PosInf, false)
    }

    pub fn is_left_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn is_right_closed(&self) -> bool {
        self.hi_closed || !self.hi.is_finite()
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl std::str::FromStr for Span {
    type Err = crate::time::ParseIntervalError;

    /// Same syntax as intervals; degenerate spans such as `(1,1]` are kept.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (open, close) = (t.chars().next(), t.chars().last());
        let inner = t.get(1..t.len().saturating_sub(1)).unwrap_or("");
        let shape = || crate::time::ParseIntervalError::Shape(s.to_string());
        let (a, b) = inner.split_once(',').ok_or_else(shape)?;
        let lo_closed = match open {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(shape()),
        };
        let hi_closed = match close {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(shape()),
        };
        let lo = parse_bound(a)?.finite().cloned().ok_or_else(shape)?;
        let hi = parse_bound(b)?;
        if hi == TimeBound::NegInf {
            return Err(shape());
        }
        Ok(Span::new(lo, lo_closed, hi, hi_closed))
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Span {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
