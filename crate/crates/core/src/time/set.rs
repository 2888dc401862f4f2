use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Interval, Rational, TimeBound};

/// A finite union of intervals in canonical form: members are non-empty,
/// sorted, pairwise disjoint, and no two of them have an interval union.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    members: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> IntervalSet {
        IntervalSet::default()
    }

    /// `[0, inf)`
    pub fn nonneg() -> IntervalSet {
        IntervalSet::from(Interval::nonneg())
    }

    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> IntervalSet {
        let mut items: Vec<Interval> = items.into_iter().filter(|i| !i.is_empty()).collect();
        items.sort_by(|a, b| a.lower_key().cmp(&b.lower_key()));
        let mut members: Vec<Interval> = Vec::with_capacity(items.len());
        for item in items {
            match members.last_mut() {
                Some(last) if last.touches(&item) => *last = last.hull(&item),
                _ => members.push(item),
            }
        }
        IntervalSet { members }
    }

    pub fn members(&self) -> &[Interval] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Interval> {
        self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.members.iter().any(|m| m.contains(t))
    }

    pub fn contains_interval(&self, i: &Interval) -> bool {
        i.is_empty() || self.members.iter().any(|m| m.contains_interval(i))
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.members.iter().all(|m| other.contains_interval(m))
    }

    pub fn intersects_interval(&self, i: &Interval) -> bool {
        self.members.iter().any(|m| !m.intersect(i).is_empty())
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.members.iter().chain(other.members.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.members {
            for b in &other.members {
                out.push(a.intersect(b));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn intersect_interval(&self, i: &Interval) -> IntervalSet {
        IntervalSet::from_intervals(self.members.iter().map(|m| m.intersect(i)))
    }

    /// Complement relative to `[0, inf)`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = TimeBound::zero();
        let mut cursor_closed = true;
        for m in self.intersect_interval(&Interval::nonneg()).members {
            out.push(Interval::new(cursor, cursor_closed, m.lo().clone(), !m.lo_closed()));
            cursor = m.hi().clone();
            cursor_closed = !m.hi_closed();
        }
        if cursor != TimeBound::PosInf {
            out.push(Interval::new(cursor, cursor_closed, TimeBound::PosInf, false));
        }
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement_everywhere())
    }

    pub fn symmetric_difference(&self, other: &IntervalSet) -> IntervalSet {
        self.difference(other).union(&other.difference(self))
    }

    /// Complement relative to the whole line.
    fn complement_everywhere(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = TimeBound::NegInf;
        let mut cursor_closed = false;
        for m in &self.members {
            out.push(Interval::new(cursor, cursor_closed, m.lo().clone(), !m.lo_closed()));
            cursor = m.hi().clone();
            cursor_closed = !m.hi_closed();
        }
        if cursor != TimeBound::PosInf {
            out.push(Interval::new(cursor, cursor_closed, TimeBound::PosInf, false));
        }
        IntervalSet::from_intervals(out)
    }

    /// `{x + r : x ∈ self}`
    pub fn shift_by(&self, r: &Rational) -> IntervalSet {
        IntervalSet::from_intervals(self.members.iter().map(|m| m.shift(r)))
    }

    /// `{x + y : x ∈ self, y ∈ i}`
    pub fn minkowski_add(&self, i: &Interval) -> IntervalSet {
        IntervalSet::from_intervals(self.members.iter().map(|m| m.minkowski(i)))
    }

    /// Union of the closed balls `[a - eps, a + eps]`.
    pub fn eps_ball<'a, I: IntoIterator<Item = &'a Rational>>(points: I, eps: &Rational) -> IntervalSet {
        IntervalSet::from_intervals(points.into_iter().map(|a| Interval::closed(a - eps, a + eps)))
    }

    /// Sorted, de-duplicated finite endpoints of all members.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .members
            .iter()
            .flat_map(|m| [m.lo().finite().cloned(), m.hi().finite().cloned()])
            .flatten()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Restriction to `[0, inf)`.
    pub fn nonneg_part(&self) -> IntervalSet {
        self.intersect_interval(&Interval::nonneg())
    }

    pub fn inf(&self) -> TimeBound {
        self.members.first().map(|m| m.inf()).unwrap_or(TimeBound::PosInf)
    }

    pub fn sup(&self) -> TimeBound {
        self.members.last().map(|m| m.sup()).unwrap_or(TimeBound::NegInf)
    }

    /// Some `(x, x + e) ⊆ self` for small positive `e`.
    pub fn holds_right_of(&self, x: &Rational) -> bool {
        self.members.iter().any(|m| m.lo().cmp_rational(x).is_le() && m.hi().cmp_rational(x).is_gt())
    }

    /// Some `(x - e, x) ⊆ self` for small positive `e`.
    pub fn holds_left_of(&self, x: &Rational) -> bool {
        self.members.iter().any(|m| m.lo().cmp_rational(x).is_lt() && m.hi().cmp_rational(x).is_ge())
    }

    pub fn starts_at_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }
}

impl From<Interval> for IntervalSet {
    fn from(i: Interval) -> Self {
        IntervalSet::from_intervals([i])
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalSet::from_intervals(iter)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return f.write_str("{}");
        }
        for (k, m) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(IntervalSet::from_intervals(Vec::<Interval>::deserialize(d)?))
    }
}
