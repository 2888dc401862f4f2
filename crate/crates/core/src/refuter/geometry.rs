//! Linear constraints over `(t1, t2)` and the convex regions they define.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::time::{serde_rational, Interval, Rational, TimeBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Gt => lhs > rhs,
            Rel::Ge => lhs >= rhs,
        }
    }

    pub fn negated(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
        }
    }

    /// The same relation with both sides multiplied by a negative number.
    fn flipped(self) -> Rel {
        match self {
            Rel::Lt => Rel::Gt,
            Rel::Le => Rel::Ge,
            Rel::Gt => Rel::Lt,
            Rel::Ge => Rel::Le,
        }
    }

    fn relaxed(self) -> Rel {
        match self {
            Rel::Lt => Rel::Le,
            Rel::Gt => Rel::Ge,
            other => other,
        }
    }

    fn is_strict(self) -> bool {
        matches!(self, Rel::Lt | Rel::Gt)
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        })
    }
}

impl std::str::FromStr for Rel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "<" => Ok(Rel::Lt),
            "<=" | "≤" => Ok(Rel::Le),
            ">" => Ok(Rel::Gt),
            ">=" | "≥" => Ok(Rel::Ge),
            other => Err(format!("unknown relation `{other}`")),
        }
    }
}

impl Serialize for Rel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `a1*t1 + a2*t2 rel b`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearConstraint {
    #[serde(with = "serde_rational")]
    pub a1: Rational,
    #[serde(with = "serde_rational")]
    pub a2: Rational,
    pub rel: Rel,
    #[serde(with = "serde_rational")]
    pub b: Rational,
}

impl LinearConstraint {
    pub fn new(a1: Rational, a2: Rational, rel: Rel, b: Rational) -> LinearConstraint {
        LinearConstraint { a1, a2, rel, b }
    }

    pub fn holds(&self, t1: &Rational, t2: &Rational) -> bool {
        self.rel.holds(&(&self.a1 * t1 + &self.a2 * t2), &self.b)
    }

    pub fn negated(&self) -> LinearConstraint {
        LinearConstraint { rel: self.rel.negated(), ..self.clone() }
    }

    pub fn relaxed(&self) -> LinearConstraint {
        LinearConstraint { rel: self.rel.relaxed(), ..self.clone() }
    }

    fn is_constant(&self) -> bool {
        self.a1.is_zero() && self.a2.is_zero()
    }

    /// As `a . t < b` or `a . t <= b`; the flag marks strictness.
    fn upper_form(&self) -> ([Rational; 2], Rational, bool) {
        let strict = self.rel.is_strict();
        match self.rel {
            Rel::Lt | Rel::Le => ([self.a1.clone(), self.a2.clone()], self.b.clone(), strict),
            Rel::Gt | Rel::Ge => ([-&self.a1, -&self.a2], -&self.b, strict),
        }
    }

    /// The line `a1*t1 + a2*t2 = b` meets `other`'s line in exactly one point.
    pub fn meet(&self, other: &LinearConstraint) -> Option<(Rational, Rational)> {
        let det = &self.a1 * &other.a2 - &self.a2 * &other.a1;
        if det.is_zero() {
            return None;
        }
        let t1 = (&self.b * &other.a2 - &self.a2 * &other.b) / &det;
        let t2 = (&self.a1 * &other.b - &self.b * &other.a1) / &det;
        Some((t1, t2))
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*t1 + {}*t2 {} {}", self.a1, self.a2, self.rel, self.b)
    }
}

/// Intersection of half-planes. Constant constraints are folded away on
/// construction: true ones are dropped, a false one empties the region.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polyhedron {
    constraints: Vec<LinearConstraint>,
    contradictory: bool,
}

impl Polyhedron {
    pub fn new(constraints: Vec<LinearConstraint>) -> Polyhedron {
        let mut out = Polyhedron::default();
        for c in constraints {
            if c.is_constant() {
                out.contradictory |= !c.rel.holds(&Rational::zero(), &c.b);
            } else {
                out.constraints.push(c);
            }
        }
        out
    }

    /// The whole `(t1, t2)` plane.
    pub fn plane() -> Polyhedron {
        Polyhedron::default()
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn contains(&self, t1: &Rational, t2: &Rational) -> bool {
        !self.contradictory && self.constraints.iter().all(|c| c.holds(t1, t2))
    }

    /// Decided by Fourier-Motzkin elimination, tracking strictness.
    pub fn is_empty(&self) -> bool {
        if self.contradictory {
            return true;
        }
        let mut rows: Vec<([Rational; 2], Rational, bool)> = self.constraints.iter().map(|c| c.upper_form()).collect();
        for var in [1, 0] {
            let (mut zero, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
            for row in rows {
                match row.0[var].cmp(&Rational::zero()) {
                    std::cmp::Ordering::Equal => zero.push(row),
                    std::cmp::Ordering::Greater => pos.push(row),
                    std::cmp::Ordering::Less => neg.push(row),
                }
            }
            for (pa, pb, ps) in &pos {
                for (na, nb, ns) in &neg {
                    let (kp, kn) = (pa[var].clone(), -&na[var]);
                    let a = [&pa[0] / &kp + &na[0] / &kn, &pa[1] / &kp + &na[1] / &kn];
                    zero.push((a, pb / &kp + nb / &kn, *ps || *ns));
                }
            }
            rows = zero;
        }
        rows.iter().any(|(_, b, strict)| if *strict { !b.is_positive() } else { b.is_negative() })
    }

    /// Topological closure; empty regions stay empty.
    pub fn closure(&self) -> Polyhedron {
        if self.is_empty() {
            return Polyhedron { constraints: vec![], contradictory: true };
        }
        Polyhedron { constraints: self.constraints.iter().map(|c| c.relaxed()).collect(), contradictory: false }
    }

    fn slice(&self, fixed: usize, value: &Rational) -> Interval {
        if self.contradictory {
            return Interval::empty();
        }
        let mut out = Interval::whole_line();
        for c in &self.constraints {
            let (k_fixed, k_free) = if fixed == 0 { (&c.a1, &c.a2) } else { (&c.a2, &c.a1) };
            let rest = &c.b - k_fixed * value;
            if k_free.is_zero() {
                if !c.rel.holds(&Rational::zero(), &rest) {
                    return Interval::empty();
                }
                continue;
            }
            let bound: TimeBound = (&rest / k_free).into();
            let rel = if k_free.is_negative() { c.rel.flipped() } else { c.rel };
            let half = match rel {
                Rel::Lt => Interval::new(TimeBound::NegInf, false, bound, false),
                Rel::Le => Interval::new(TimeBound::NegInf, false, bound, true),
                Rel::Gt => Interval::new(bound, false, TimeBound::PosInf, false),
                Rel::Ge => Interval::new(bound, true, TimeBound::PosInf, false),
            };
            out = out.intersect(&half);
        }
        out
    }

    /// `{t2 : (c, t2) ∈ self}`
    pub fn slice_at_t1(&self, c: &Rational) -> Interval {
        self.slice(0, c)
    }

    /// `{t1 : (t1, r) ∈ self}`
    pub fn slice_at_t2(&self, r: &Rational) -> Interval {
        self.slice(1, r)
    }

    /// Intersections of constraint lines, in no particular order.
    pub fn line_meets(&self) -> Vec<(Rational, Rational)> {
        let mut out = Vec::new();
        for (k, a) in self.constraints.iter().enumerate() {
            for b in &self.constraints[k + 1..] {
                out.extend(a.meet(b));
            }
        }
        out
    }

    /// Vertices of the closure.
    pub fn vertices(&self) -> Vec<(Rational, Rational)> {
        let closure = self.closure();
        let mut out: Vec<_> = closure.line_meets().into_iter().filter(|(x, y)| closure.contains(x, y)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// `t2` values of edges of the closure lying on lines `t2 = const`.
    pub fn flat_edges(&self) -> Vec<Rational> {
        let closure = self.closure();
        let mut out: Vec<Rational> = closure
            .constraints
            .iter()
            .filter(|c| c.a1.is_zero())
            .map(|c| &c.b / &c.a2)
            .filter(|v| !closure.slice_at_t2(v).is_empty())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl Serialize for Polyhedron {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.contradictory {
            let never = LinearConstraint::new(Rational::zero(), Rational::zero(), Rel::Lt, Rational::zero());
            return vec![never].serialize(s);
        }
        self.constraints.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Polyhedron::new(Vec::<LinearConstraint>::deserialize(d)?))
    }
}
