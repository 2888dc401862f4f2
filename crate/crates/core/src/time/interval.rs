use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{midpoint, parse_rational, Rational, TimeBound};

/// A convex subset of the extended real line with independent endpoint closure.
///
/// Construction normalizes: infinite endpoints are open and every empty
/// interval becomes `(0,0)`, so derived equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: TimeBound,
    hi: TimeBound,
    lo_closed: bool,
    hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseIntervalError {
    #[error("interval `{0}` must look like [a,b], (a,b), [a,b) or (a,b]")]
    Shape(String),
    #[error("bad endpoint `{0}`")]
    Endpoint(String),
}

impl Interval {
    pub fn new(lo: TimeBound, lo_closed: bool, hi: TimeBound, hi_closed: bool) -> Interval {
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        let empty = match lo.cmp(&hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(lo_closed && hi_closed),
            Ordering::Less => false,
        };
        if empty {
            Interval::empty()
        } else {
            Interval { lo, hi, lo_closed, hi_closed }
        }
    }

    pub fn empty() -> Interval {
        Interval { lo: TimeBound::zero(), hi: TimeBound::zero(), lo_closed: false, hi_closed: false }
    }

    pub fn closed(a: Rational, b: Rational) -> Interval {
        Interval::new(a.into(), true, b.into(), true)
    }

    pub fn open(a: Rational, b: Rational) -> Interval {
        Interval::new(a.into(), false, b.into(), false)
    }

    pub fn closed_open(a: Rational, b: Rational) -> Interval {
        Interval::new(a.into(), true, b.into(), false)
    }

    pub fn open_closed(a: Rational, b: Rational) -> Interval {
        Interval::new(a.into(), false, b.into(), true)
    }

    pub fn point(a: Rational) -> Interval {
        Interval::closed(a.clone(), a)
    }

    /// `[a, inf)`
    pub fn at_least(a: Rational) -> Interval {
        Interval::new(a.into(), true, TimeBound::PosInf, false)
    }

    /// `(a, inf)`
    pub fn greater_than(a: Rational) -> Interval {
        Interval::new(a.into(), false, TimeBound::PosInf, false)
    }

    /// `[0, inf)`
    pub fn nonneg() -> Interval {
        Interval::at_least(Rational::zero())
    }

    /// `(0, inf)`, the default decoration of untimed operators.
    pub fn positive() -> Interval {
        Interval::greater_than(Rational::zero())
    }

    pub fn whole_line() -> Interval {
        Interval::new(TimeBound::NegInf, false, TimeBound::PosInf, false)
    }

    pub fn lo(&self) -> &TimeBound {
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

    pub fn is_empty(&self) -> bool {
        *self == Interval::empty()
    }

    pub fn is_singleton(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.is_empty() || (self.lo.is_finite() && self.hi.is_finite())
    }

    /// Infimum; `+inf` for the empty interval.
    pub fn inf(&self) -> TimeBound {
        if self.is_empty() {
            TimeBound::PosInf
        } else {
            self.lo.clone()
        }
    }

    /// Supremum; `-inf` for the empty interval.
    pub fn sup(&self) -> TimeBound {
        if self.is_empty() {
            TimeBound::NegInf
        } else {
            self.hi.clone()
        }
    }

    /// `sup - inf`, which is `-inf` when empty and `0` for a singleton.
    pub fn width(&self) -> TimeBound {
        if self.is_empty() {
            return TimeBound::NegInf;
        }
        match (&self.lo, &self.hi) {
            (TimeBound::Finite(a), TimeBound::Finite(b)) => TimeBound::Finite(b - a),
            _ => TimeBound::PosInf,
        }
    }

    pub fn inf_sup_width(&self) -> (TimeBound, TimeBound, TimeBound) {
        (self.inf(), self.sup(), self.width())
    }

    pub fn contains(&self, t: &Rational) -> bool {
        if self.is_empty() {
            return false;
        }
        let above = match self.lo.cmp_rational(t) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match self.hi.cmp_rational(t) {
            Ordering::Greater => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Less => false,
        };
        above && below
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || self.intersect(other) == *other
    }

    /// The supremum is infinite or attained.
    pub fn is_right_closed(&self) -> bool {
        match self.sup() {
            TimeBound::Finite(s) => self.contains(&s),
            _ => true,
        }
    }

    /// The infimum is infinite or attained.
    pub fn is_left_closed(&self) -> bool {
        match self.inf() {
            TimeBound::Finite(i) => self.contains(&i),
            _ => true,
        }
    }

    pub fn is_left_open(&self) -> bool {
        !self.is_left_closed()
    }

    pub fn open_core(&self) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.clone(), false, self.hi.clone(), false)
    }

    pub fn close_left(&self) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.clone(), true, self.hi.clone(), self.hi_closed)
    }

    pub fn close_right(&self) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.clone(), self.lo_closed, self.hi.clone(), true)
    }

    /// `(i ∪ {inf i}) \ {sup i}`
    pub fn open_right_close_left(&self) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.clone(), true, self.hi.clone(), false)
    }

    /// `(i ∪ {sup i}) \ {inf i}`
    pub fn open_left_close_right(&self) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.clone(), false, self.hi.clone(), true)
    }

    pub fn variants(&self) -> (Interval, Interval, Interval, Interval) {
        (self.open_core(), self.close_left(), self.open_right_close_left(), self.open_left_close_right())
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    /// `{-x : x ∈ i}`
    pub fn neg(&self) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.hi.neg(), self.hi_closed, self.lo.neg(), self.lo_closed)
    }

    /// `{x + r : x ∈ i}`
    pub fn shift(&self, r: &Rational) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.shift(r), self.lo_closed, self.hi.shift(r), self.hi_closed)
    }

    /// Minkowski sum `{x + y : x ∈ self, y ∈ other}`.
    pub fn minkowski(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        let lo = self.lo.add(&other.lo).expect("lower bounds are never +inf");
        let hi = self.hi.add(&other.hi).expect("upper bounds are never -inf");
        Interval::new(lo, self.lo_closed && other.lo_closed, hi, self.hi_closed && other.hi_closed)
    }

    /// The lower end as a sort key: closed starts come first.
    pub(crate) fn lower_key(&self) -> (&TimeBound, bool) {
        (&self.lo, !self.lo_closed)
    }

    /// The upper end as a sort key: closed ends come last.
    pub(crate) fn upper_key(&self) -> (&TimeBound, bool) {
        (&self.hi, self.hi_closed)
    }

    /// True when the union of the two intervals is an interval.
    pub fn touches(&self, other: &Interval) -> bool {
        if self.is_empty() || other.is_empty() {
            return true;
        }
        let (a, b) = if self.lower_key() <= other.lower_key() { (self, other) } else { (other, self) };
        match a.hi.cmp(&b.lo) {
            Ordering::Greater => true,
            Ordering::Equal => a.hi_closed || b.lo_closed,
            Ordering::Less => false,
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let (lo, lo_closed) = if self.lower_key() <= other.lower_key() {
            (self.lo.clone(), self.lo_closed)
        } else {
            (other.lo.clone(), other.lo_closed)
        };
        let (hi, hi_closed) = if self.upper_key() >= other.upper_key() {
            (self.hi.clone(), self.hi_closed)
        } else {
            (other.hi.clone(), other.hi_closed)
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    /// Some rational strictly inside a non-degenerate interval, or the point itself.
    pub fn sample(&self) -> Option<Rational> {
        if self.is_empty() {
            return None;
        }
        Some(match (&self.lo, &self.hi) {
            (TimeBound::Finite(a), TimeBound::Finite(b)) => midpoint(a, b),
            (TimeBound::Finite(a), _) => a + super::int(1),
            (_, TimeBound::Finite(b)) => b - super::int(1),
            _ => Rational::zero(),
        })
    }
}

impl fmt::Display for Interval {
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

pub(crate) fn parse_bound(text: &str) -> Result<TimeBound, ParseIntervalError> {
    match text.trim() {
        "inf" | "+inf" | "∞" => Ok(TimeBound::PosInf),
        "-inf" | "-∞" => Ok(TimeBound::NegInf),
        t => parse_rational(t)
            .map(TimeBound::Finite)
            .map_err(|_| ParseIntervalError::Endpoint(t.to_string())),
    }
}

impl FromStr for Interval {
    type Err = ParseIntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let shape = || ParseIntervalError::Shape(s.to_string());
        let t = s.trim();
        let lo_closed = match t.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(shape()),
        };
        let hi_closed = match t.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(shape()),
        };
        let inner = &t[1..t.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(shape)?;
        Ok(Interval::new(parse_bound(a)?, lo_closed, parse_bound(b)?, hi_closed))
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{int, rat};

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    #[test]
    fn inf_sup_width_cases() {
        assert_eq!(iv("[1,2]").inf_sup_width(), (int(1).into(), int(2).into(), int(1).into()));
        assert_eq!(
            Interval::empty().inf_sup_width(),
            (TimeBound::PosInf, TimeBound::NegInf, TimeBound::NegInf)
        );
        assert_eq!(iv("[3,3]").width(), TimeBound::Finite(int(0)));
        assert!(iv("[3,3]").is_singleton());
    }

    #[test]
    fn normalization() {
        assert_eq!(iv("[2,1]"), Interval::empty());
        assert_eq!(iv("[1,1)"), Interval::empty());
        assert_eq!(Interval::new(int(0).into(), true, TimeBound::PosInf, true), iv("[0,inf)"));
        assert_eq!(iv("(0,0)").to_string(), "(0,0)");
        assert_eq!(iv("[0.5, 3/2)"), Interval::closed_open(rat(1, 2), rat(3, 2)));
    }

    #[test]
    fn variant_examples() {
        let (core, cl, orcl, olcr) = iv("(1,2]").variants();
        assert_eq!((core, cl, orcl, olcr), (iv("(1,2)"), iv("[1,2]"), iv("[1,2)"), iv("(1,2]")));
        let (core, cl, _, _) = iv("[0,0]").variants();
        assert!(core.is_empty());
        assert_eq!(cl, iv("[0,0]"));
        let (_, cl, _, olcr) = iv("(0,inf)").variants();
        assert_eq!(cl, iv("[0,inf)"));
        assert_eq!(olcr, iv("(0,inf)"));
    }

    #[test]
    fn closedness_predicates() {
        assert!(iv("(0,inf)").is_right_closed());
        assert!(iv("(0,inf)").is_left_open());
        assert!(!iv("[1,2)").is_right_closed());
        assert!(Interval::empty().is_right_closed());
    }

    #[test]
    fn minkowski_of_point_and_open() {
        assert_eq!(iv("[3,3]").minkowski(&iv("(0,2)")), iv("(3,5)"));
        assert_eq!(iv("[0,1)").minkowski(&iv("[1,inf)")), iv("[1,inf)"));
        assert_eq!(iv("(1,2]").neg(), iv("[-2,-1)"));
    }

    #[test]
    fn touching() {
        assert!(iv("[0,1]").touches(&iv("(1,2)")));
        assert!(iv("[0,1)").touches(&iv("[1,2)")));
        assert!(!iv("[0,1)").touches(&iv("(1,2)")));
        assert_eq!(iv("[0,1)").hull(&iv("(1,2]")), iv("[0,2]"));
    }
}
