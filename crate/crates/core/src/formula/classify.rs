use serde::{Deserialize, Serialize};

use super::Formula;
use crate::time::{bit_length, serde_rational, Interval, Rational, TimeBound};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentReport {
    pub is_mtl: bool,
    pub is_mitl: bool,
    pub is_mitl0inf: bool,
    pub is_mitlwi: bool,
    pub size_bits: u64,
    #[serde(with = "serde_rational::option")]
    pub worst_ratio: Option<Rational>,
}

/// `sup / (sup - inf)` for intervals with `0 < inf < sup < inf`.
fn wideness_ratio(i: &Interval) -> Option<Rational> {
    let (lo, hi) = (i.inf(), i.sup());
    let (a, b) = (lo.finite()?, hi.finite()?);
    if lo > TimeBound::zero() && a < b {
        Some(b / (b - a))
    } else {
        None
    }
}

fn endpoint_bits(b: &TimeBound) -> u64 {
    b.finite().map_or(0, |r| bit_length(r.numer()) + bit_length(r.denom()))
}

pub fn classify(f: &Formula) -> FragmentReport {
    let intervals = f.intervals();
    let size_bits = f.size() as u64
        + intervals
            .iter()
            .filter(|i| !i.is_empty())
            .map(|i| endpoint_bits(i.lo()) + endpoint_bits(i.hi()))
            .sum::<u64>();
    let is_mitl = intervals.iter().all(|i| !i.is_singleton());
    let is_mitl0inf = is_mitl
        && intervals
            .iter()
            .all(|i| i.inf() == TimeBound::zero() || i.sup() == TimeBound::PosInf);
    let ratios: Vec<Rational> = intervals.iter().filter_map(|i| wideness_ratio(i)).collect();
    let bound = Rational::from_integer(size_bits.into());
    let is_mitlwi = is_mitl && ratios.iter().all(|r| *r <= bound);
    FragmentReport {
        is_mtl: true,
        is_mitl,
        is_mitl0inf,
        is_mitlwi,
        size_bits,
        worst_ratio: ratios.into_iter().max(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormTag {
    Type(u8),
    NotNormal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormReport {
    /// Each temporal subformula in pre-order, printed, with its tag.
    pub tags: Vec<(String, NormalFormTag)>,
    pub in_normal_form: bool,
}

fn zero_anchored_bounded(i: &Interval) -> bool {
    !i.is_empty() && i.is_left_open() && i.inf() == TimeBound::zero() && i.sup().is_finite()
}

fn positive_bounded(i: &Interval) -> bool {
    !i.is_empty() && i.inf() > TimeBound::zero() && i.sup().is_finite()
}

fn temporal_type(f: &Formula) -> NormalFormTag {
    let tag = match f {
        Formula::Until(a, _, i) if **a == Formula::Top && zero_anchored_bounded(i) => 1,
        Formula::Release(a, _, i) if **a == Formula::Bottom && zero_anchored_bounded(i) => 2,
        Formula::Release(a, _, i) if **a == Formula::Bottom && *i == Interval::positive() => 3,
        Formula::Until(_, _, i) if positive_bounded(i) => 4,
        Formula::Release(_, _, i) if positive_bounded(i) => 5,
        Formula::Until(_, _, i) if *i == Interval::positive() => 6,
        _ => return NormalFormTag::NotNormal,
    };
    NormalFormTag::Type(tag)
}

/// Literal/boolean skeleton check; constants count as literals.
fn skeleton_ok(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => true,
        Formula::Not(a) => matches!(**a, Formula::Atom(_)),
        Formula::Or(a, b) | Formula::And(a, b) => skeleton_ok(a) && skeleton_ok(b),
        Formula::Until(a, b, _) | Formula::Release(a, b, _) => {
            temporal_type(f) != NormalFormTag::NotNormal && skeleton_ok(a) && skeleton_ok(b)
        }
    }
}

pub fn normal_form_type(f: &Formula) -> NormalFormReport {
    let mut tags = Vec::new();
    f.walk(&mut |g| {
        if g.is_temporal() {
            tags.push((g.to_string(), temporal_type(g)));
        }
    });
    NormalFormReport { tags, in_normal_form: skeleton_ok(f) }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use crate::time::int;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn fragments() {
        assert!(!classify(&f("p U[1,1] q")).is_mitl);
        assert!(classify(&f("p U(0,5] q")).is_mitl0inf);
        let r = classify(&f("G[1,2] F[1/100,1/50] q"));
        assert!(r.is_mitl && r.is_mitlwi && !r.is_mitl0inf);
        assert_eq!(r.worst_ratio, Some(int(2)));
        // 5 nodes; endpoints 1,1 2,1 1,1 7,6 bits.
        assert_eq!(r.size_bits, 25);
    }

    #[test]
    fn narrow_interval_is_not_wide() {
        let r = classify(&f("p U[1000,1001] q"));
        assert!(r.is_mitl && !r.is_mitlwi);
        assert_eq!(r.worst_ratio, Some(int(1001)));
    }

    #[test]
    fn normal_form_examples() {
        let tag = |s: &str| normal_form_type(&f(s)).tags[0].1;
        assert_eq!(tag("F(0,3] p"), NormalFormTag::Type(1));
        assert_eq!(tag("G(0,3) p"), NormalFormTag::Type(2));
        assert_eq!(tag("G p"), NormalFormTag::Type(3));
        assert_eq!(tag("p U[1,2] q"), NormalFormTag::Type(4));
        assert_eq!(tag("p R(1,2] q"), NormalFormTag::Type(5));
        assert_eq!(tag("p U q"), NormalFormTag::Type(6));
        assert_eq!(tag("p U[0,2] q"), NormalFormTag::NotNormal);
        assert!(normal_form_type(&f("!p & (p U[1,2] !q)")).in_normal_form);
        assert!(!normal_form_type(&f("!(p U[1,2] q)")).in_normal_form);
        assert!(!normal_form_type(&f("p & (q U[0,1] p)")).in_normal_form);
    }
}
