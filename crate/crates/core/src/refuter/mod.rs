//! Candidate two-variable `∃t1 ∀t2` Release semantics in canonical form, their
//! decision over signals, and the construction of a pair of signals on which
//! any such candidate disagrees with `¬(p U_i q)` under the old semantics.

mod geometry;
pub mod random;

pub use geometry::{LinearConstraint, Polyhedron, Rel};

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::eval::{sat, Semantics};
use crate::formula::{parse, Formula};
use crate::signal::{Segment, Signal, SignalError};
use crate::time::{int, midpoint, serde_rational, Interval, IntervalSet, Rational, TimeBound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefuterError {
    #[error("interval {0} is empty")]
    EmptyInterval(Interval),
    #[error("interval {0} must be non-empty, non-singleton and within [0,inf)")]
    DegenerateInterval(Interval),
    #[error("invalid clause: {0}")]
    InvalidClause(String),
    #[error("need 0 < epsilon < delta, got epsilon={epsilon} delta={delta}")]
    BadEpsilon { epsilon: Rational, delta: Rational },
    #[error("candidate agrees with the target on both signals")]
    NoMismatch,
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// `f^{t_var} ⊨ psi` for a propositional `psi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignalAtom {
    pub var: u8,
    pub psi: Formula,
}

impl SignalAtom {
    pub fn new(var: u8, psi: Formula) -> Result<SignalAtom, RefuterError> {
        if var != 1 && var != 2 {
            return Err(RefuterError::InvalidClause(format!("variable index {var} is not 1 or 2")));
        }
        if !psi.is_propositional() {
            return Err(RefuterError::InvalidClause(format!("{psi} is not propositional")));
        }
        Ok(SignalAtom { var, psi })
    }

    pub fn negated(&self) -> SignalAtom {
        SignalAtom { var: self.var, psi: Formula::not(self.psi.clone()) }
    }
}

#[derive(Serialize, Deserialize)]
struct RawAtom {
    var: u8,
    psi: String,
}

impl Serialize for SignalAtom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawAtom { var: self.var, psi: self.psi.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignalAtom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawAtom::deserialize(d)?;
        let psi = parse(&raw.psi).map_err(D::Error::custom)?;
        SignalAtom::new(raw.var, psi).map_err(D::Error::custom)
    }
}

/// `domain ⇒ signal`, where `signal` is a disjunction of at most one atom per
/// variable. An empty disjunction is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Clause {
    pub domain: Polyhedron,
    pub signal: Vec<SignalAtom>,
}

impl Clause {
    pub fn new(domain: Polyhedron, signal: Vec<SignalAtom>) -> Result<Clause, RefuterError> {
        for var in [1, 2] {
            if signal.iter().filter(|a| a.var == var).count() > 1 {
                return Err(RefuterError::InvalidClause(format!("more than one atom on t{var}")));
            }
        }
        Ok(Clause { domain, signal })
    }

    /// The clause equivalent to the disjunction of `linear` and `signal`.
    pub fn from_disjunction(linear: &[LinearConstraint], signal: Vec<SignalAtom>) -> Result<Clause, RefuterError> {
        Clause::new(Polyhedron::new(linear.iter().map(LinearConstraint::negated).collect()), signal)
    }

    fn atom(&self, var: u8) -> Option<&Formula> {
        self.signal.iter().find(|a| a.var == var).map(|a| &a.psi)
    }
}

impl<'de> Deserialize<'de> for Clause {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            domain: Polyhedron,
            #[serde(default)]
            signal: Vec<SignalAtom>,
        }
        let raw = Raw::deserialize(d)?;
        Clause::new(raw.domain, raw.signal).map_err(serde::de::Error::custom)
    }
}

/// Conjunction over blocks of disjunctions of clause conjunctions, each block
/// read as `∃t1 ∀t2`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CanonicalFormula {
    pub blocks: Vec<Vec<Vec<Clause>>>,
}

impl CanonicalFormula {
    pub fn from_json(text: &str) -> Result<CanonicalFormula, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("canonical formulas serialize")
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.blocks.iter().flatten().flatten()
    }

    pub fn polyhedra(&self) -> impl Iterator<Item = &Polyhedron> {
        self.clauses().map(|c| &c.domain)
    }
}

fn prop_holds(psi: &Formula, props: &BTreeSet<String>) -> bool {
    match psi {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(p) => props.contains(p),
        Formula::Not(a) => !prop_holds(a, props),
        Formula::Or(a, b) => prop_holds(a, props) || prop_holds(b, props),
        Formula::And(a, b) => prop_holds(a, props) && prop_holds(b, props),
        other => unreachable!("signal atoms are propositional, got {other}"),
    }
}

/// Times on the whole line where `psi` holds; before 0 the signal is empty.
fn psi_set(f: &Signal, psi: &Formula) -> IntervalSet {
    let mut parts: Vec<Interval> =
        f.segments().iter().filter(|s| prop_holds(psi, &s.props)).map(|s| s.interval.clone()).collect();
    if prop_holds(psi, &BTreeSet::new()) {
        parts.push(Interval::new(TimeBound::NegInf, false, TimeBound::zero(), false));
    }
    IntervalSet::from_intervals(parts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockWitness {
    /// Index of the satisfied disjunct.
    pub disjunct: usize,
    #[serde(with = "serde_rational")]
    pub c: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalEval {
    pub holds: bool,
    /// One entry per block; `None` where no line works.
    pub witnesses: Vec<Option<BlockWitness>>,
}

struct Decider {
    sets: Vec<Vec<Vec<[Option<IntervalSet>; 2]>>>,
}

impl Decider {
    fn new(phi: &CanonicalFormula, f: &Signal) -> Decider {
        let sets = phi
            .blocks
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(|clauses| {
                        clauses.iter().map(|c| [c.atom(1).map(|p| psi_set(f, p)), c.atom(2).map(|p| psi_set(f, p))]).collect()
                    })
                    .collect()
            })
            .collect();
        Decider { sets }
    }

    fn clause_on_line(&self, clause: &Clause, sets: &[Option<IntervalSet>; 2], c: &Rational) -> bool {
        let j = clause.domain.slice_at_t1(c);
        j.is_empty()
            || sets[0].as_ref().is_some_and(|s| s.contains(c))
            || sets[1].as_ref().is_some_and(|s| s.contains_interval(&j))
    }

    fn disjunct_on_line(&self, phi: &CanonicalFormula, (i, j): (usize, usize), c: &Rational) -> bool {
        phi.blocks[i][j].iter().zip(&self.sets[i][j]).all(|(clause, sets)| self.clause_on_line(clause, sets, c))
    }
}

/// Values of `t1` where the truth of some clause on the line `t1 = c` can
/// change: line crossings, signal breakpoints and the `c` at which a slice
/// endpoint meets a breakpoint.
fn critical_lines(phi: &CanonicalFormula, f: &Signal) -> Vec<Rational> {
    let breaks = f.breakpoints();
    let mut out = breaks.clone();
    for p in phi.polyhedra() {
        out.extend(p.line_meets().into_iter().map(|(x, _)| x));
        for k in p.constraints().iter().filter(|k| !k.a1.is_zero()) {
            out.extend(breaks.iter().map(|x| (&k.b - &k.a2 * x) / &k.a1));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Sample lines: every critical value, a midpoint of each gap and one line
/// beyond each end.
fn sample_lines(points: &[Rational]) -> Vec<Rational> {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return vec![Rational::zero()];
    };
    let mut out = vec![first - int(1)];
    for w in points.windows(2) {
        out.push(w[0].clone());
        out.push(midpoint(&w[0], &w[1]));
    }
    out.push(last.clone());
    out.push(last + int(1));
    out
}

/// Decides `phi` on `f`, with the least witnessing line of the first
/// satisfiable disjunct per block.
pub fn eval_canonical(phi: &CanonicalFormula, f: &Signal) -> CanonicalEval {
    let decider = Decider::new(phi, f);
    let lines = sample_lines(&critical_lines(phi, f));
    let witnesses: Vec<Option<BlockWitness>> = phi
        .blocks
        .iter()
        .enumerate()
        .map(|(i, block)| {
            (0..block.len()).find_map(|j| {
                lines.iter().find(|c| decider.disjunct_on_line(phi, (i, j), c)).map(|c| BlockWitness { disjunct: j, c: c.clone() })
            })
        })
        .collect();
    CanonicalEval { holds: witnesses.iter().all(Option::is_some), witnesses }
}

/// Whether the line `t1 = c` satisfies every clause of the given disjunct.
pub fn line_satisfies(phi: &CanonicalFormula, f: &Signal, block: usize, disjunct: usize, c: &Rational) -> bool {
    Decider::new(phi, f).disjunct_on_line(phi, (block, disjunct), c)
}

fn on_t2(rel: Rel, b: Rational) -> LinearConstraint {
    LinearConstraint::new(Rational::zero(), int(1), rel, b)
}

fn membership_t2(i: &Interval) -> Vec<LinearConstraint> {
    let mut out = Vec::new();
    if let Some(a) = i.lo().finite() {
        out.push(on_t2(if i.lo_closed() { Rel::Ge } else { Rel::Gt }, a.clone()));
    }
    if let Some(b) = i.hi().finite() {
        out.push(on_t2(if i.hi_closed() { Rel::Le } else { Rel::Lt }, b.clone()));
    }
    out
}

/// The old-semantics `¬p R_i ¬q` written in canonical form: a single block
/// whose two disjuncts are the universal and the handover readings.
pub fn encode_old_release(i: &Interval) -> Result<CanonicalFormula, RefuterError> {
    if i.is_empty() {
        return Err(RefuterError::EmptyInterval(i.clone()));
    }
    let not = |p: &str| Formula::not(Formula::atom(p));
    let atom = |var, p| SignalAtom::new(var, not(p)).expect("literal atoms are valid");
    let everywhere = vec![Clause::new(Polyhedron::new(membership_t2(i)), vec![atom(2, "q")])?];
    let mut before = vec![
        on_t2(Rel::Ge, Rational::zero()),
        LinearConstraint::new(int(-1), int(1), Rel::Le, Rational::zero()),
    ];
    before.extend(membership_t2(i));
    let handover = vec![
        Clause::new(Polyhedron::new(vec![LinearConstraint::new(int(1), Rational::zero(), Rel::Le, Rational::zero())]), vec![])?,
        Clause::new(Polyhedron::plane(), vec![atom(1, "p")])?,
        Clause::new(Polyhedron::new(before), vec![atom(2, "q")])?,
    ];
    Ok(CanonicalFormula { blocks: vec![vec![everywhere, handover]] })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerSets {
    /// Vertices of the closures of all non-empty domains.
    pub vertices: Vec<(String, String)>,
    /// `t2` values of closure edges on horizontal lines `t2 = const`.
    #[serde(with = "serde_rational::vec")]
    pub flat_edges: Vec<Rational>,
    /// `t2` projection of the vertices and edges.
    #[serde(with = "serde_rational::vec")]
    pub c2: Vec<Rational>,
    /// `c2` plus the supremum of the interval when finite.
    #[serde(with = "serde_rational::vec")]
    pub c3: Vec<Rational>,
}

pub fn corner_sets(phi: &CanonicalFormula, i: &Interval) -> CornerSets {
    let mut vertices = Vec::new();
    let mut flat_edges = Vec::new();
    for p in phi.polyhedra() {
        vertices.extend(p.vertices());
        flat_edges.extend(p.flat_edges());
    }
    vertices.sort();
    vertices.dedup();
    flat_edges.sort();
    flat_edges.dedup();
    let mut c2: Vec<Rational> = vertices.iter().map(|(_, y)| y.clone()).chain(flat_edges.iter().cloned()).collect();
    c2.sort();
    c2.dedup();
    let mut c3 = c2.clone();
    if let Some(s) = i.sup().finite() {
        c3.push(s.clone());
        c3.sort();
        c3.dedup();
    }
    let vertices = vertices.into_iter().map(|(x, y)| (x.to_string(), y.to_string())).collect();
    CornerSets { vertices, flat_edges, c2, c3 }
}

fn check_interval(i: &Interval) -> Result<(Rational, TimeBound), RefuterError> {
    if i.is_empty() {
        return Err(RefuterError::EmptyInterval(i.clone()));
    }
    match i.inf().finite() {
        Some(lo) if !lo.is_negative() && !i.is_singleton() => Ok((lo.clone(), i.sup())),
        _ => Err(RefuterError::DegenerateInterval(i.clone())),
    }
}

/// Midpoint of the widest gap between consecutive points of `c3` inside `i`,
/// with a quarter of its width as clearance. An unbounded gap counts as width
/// 2 starting at its left end. Ties go to the lowest gap.
pub fn choose_r(phi: &CanonicalFormula, i: &Interval) -> Result<(Rational, Rational), RefuterError> {
    let (lo, hi) = check_interval(i)?;
    let mut cuts = vec![lo.clone()];
    cuts.extend(corner_sets(phi, i).c3.into_iter().filter(|x| *x > lo && hi.cmp_rational(x).is_gt()));
    let mut best: Option<(Rational, Rational)> = None;
    for (k, x) in cuts.iter().enumerate() {
        let (r, width) = match cuts.get(k + 1).map(|y| TimeBound::from(y.clone())).unwrap_or_else(|| hi.clone()) {
            TimeBound::Finite(y) => (midpoint(x, &y), &y - x),
            _ => (x + int(1), int(2)),
        };
        if best.as_ref().is_none_or(|(_, w)| width > *w) {
            best = Some((r, width));
        }
    }
    let (r, width) = best.expect("at least one gap");
    Ok((r, width / int(4)))
}

fn width(i: &Interval) -> TimeBound {
    if i.is_empty() {
        TimeBound::zero()
    } else {
        i.width()
    }
}

/// Half the least positive slice width `{t1 = c}` of any closed domain over
/// the lines meeting it at `t2 = r`, capped at half the room above `r`.
/// Slice widths are concave in `c`, so the least one sits at an end of the
/// admissible range or at a vertex.
pub fn choose_delta(phi: &CanonicalFormula, r: &Rational, i: &Interval) -> Rational {
    let mut least: Option<Rational> = None;
    for p in phi.polyhedra() {
        let closure = p.closure();
        let admissible = closure.slice_at_t2(r);
        if admissible.is_empty() {
            continue;
        }
        let mut lines: Vec<Rational> = [admissible.lo().finite(), admissible.hi().finite()].into_iter().flatten().cloned().collect();
        lines.extend(closure.line_meets().into_iter().map(|(x, _)| x).filter(|x| admissible.contains(x)));
        lines.extend(admissible.sample());
        for c in lines {
            if let TimeBound::Finite(w) = width(&closure.slice_at_t1(&c)) {
                if w.is_positive() && least.as_ref().is_none_or(|l| w < *l) {
                    least = Some(w);
                }
            }
        }
    }
    let half = least.map(|w| w / int(2));
    let cap = i.sup().finite().map(|s| (s - r) / int(2));
    match (half, cap) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => int(1),
    }
}

fn three_segments(first: Interval, middle: Interval, tail: Interval) -> Result<Signal, RefuterError> {
    Ok(Signal::validate(vec![Segment::new(first, &["p"]), Segment::new(middle, &["q"]), Segment::new(tail, &["p"])])?)
}

/// `p` on `[0,r]`, `q` on `(r,r+δ]`, `p` afterwards.
pub fn build_f1(r: &Rational, delta: &Rational) -> Result<Signal, RefuterError> {
    let end = r + delta;
    three_segments(Interval::closed(Rational::zero(), r.clone()), Interval::open_closed(r.clone(), end.clone()), Interval::greater_than(end))
}

/// `p` on `[0,r+ε)`, `q` on `[r+ε,r+δ]`, `p` afterwards.
pub fn build_f2(r: &Rational, delta: &Rational, epsilon: &Rational) -> Result<Signal, RefuterError> {
    if !epsilon.is_positive() || epsilon >= delta {
        return Err(RefuterError::BadEpsilon { epsilon: epsilon.clone(), delta: delta.clone() });
    }
    let (cut, end) = (r + epsilon, r + delta);
    three_segments(Interval::closed_open(Rational::zero(), cut.clone()), Interval::closed(cut, end.clone()), Interval::greater_than(end))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonChoice {
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    /// No witnessed clause bounded the choice.
    pub degenerate: bool,
}

/// Half the least distance from `r` to a slice endpoint or witness line
/// above it, bounded by `δ`, so that `(r, r+ε)` lies inside or outside every
/// witnessed slice.
pub fn choose_epsilon(phi: &CanonicalFormula, r: &Rational, delta: &Rational, witnesses: &[Option<BlockWitness>]) -> EpsilonChoice {
    let mut bounds = vec![delta.clone()];
    let mut degenerate = true;
    for (block, w) in phi.blocks.iter().zip(witnesses) {
        let Some(w) = w else { continue };
        if w.c > *r {
            bounds.push(&w.c - r);
        }
        for clause in &block[w.disjunct] {
            let j = clause.domain.slice_at_t1(&w.c);
            if j.is_empty() {
                continue;
            }
            let (inf, sup) = (j.inf(), j.sup());
            if inf.cmp_rational(r).is_le() && sup.cmp_rational(r).is_gt() {
                degenerate = false;
                if let TimeBound::Finite(s) = sup {
                    bounds.push(s - r);
                }
            } else if let TimeBound::Finite(a) = inf.clone() {
                if a > *r {
                    degenerate = false;
                    bounds.push(a - r);
                }
            }
        }
    }
    let least = bounds.into_iter().min().expect("delta is always a bound");
    EpsilonChoice { epsilon: least / int(2), degenerate }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationReport {
    pub interval: Interval,
    pub corners: CornerSets,
    #[serde(with = "serde_rational")]
    pub r: Rational,
    #[serde(with = "serde_rational")]
    pub guard: Rational,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub epsilon_degenerate: bool,
    pub f1: Signal,
    pub f2: Signal,
    pub phi_on_f1: bool,
    pub phi_on_f2: bool,
    pub target_on_f1: bool,
    pub target_on_f2: bool,
    pub witnesses_f1: Vec<Option<BlockWitness>>,
    pub witnesses_f2: Vec<Option<BlockWitness>>,
    /// 1 or 2: the signal on which `phi` and the target disagree.
    pub mismatch_signal: u8,
}

fn target(i: &Interval) -> Formula {
    Formula::not(Formula::until(Formula::atom("p"), Formula::atom("q"), i.clone()))
}

/// Builds both signals for `phi` and `i` and reports where `phi` differs from
/// `¬(p U_i q)` under the old semantics.
pub fn refute(phi: &CanonicalFormula, i: &Interval) -> Result<RefutationReport, RefuterError> {
    let corners = corner_sets(phi, i);
    let (r, guard) = choose_r(phi, i)?;
    let delta = choose_delta(phi, &r, i);
    let f1 = build_f1(&r, &delta)?;
    let on_f1 = eval_canonical(phi, &f1);
    let eps = choose_epsilon(phi, &r, &delta, &on_f1.witnesses);
    let f2 = build_f2(&r, &delta, &eps.epsilon)?;
    let on_f2 = eval_canonical(phi, &f2);
    let target = target(i);
    let (target_on_f1, target_on_f2) = (sat(&f1, &target, Semantics::Old), sat(&f2, &target, Semantics::Old));
    let mismatch_signal = if on_f1.holds != target_on_f1 {
        1
    } else if on_f2.holds != target_on_f2 {
        2
    } else {
        return Err(RefuterError::NoMismatch);
    };
    Ok(RefutationReport {
        interval: i.clone(),
        corners,
        r,
        guard,
        delta,
        epsilon: eps.epsilon,
        epsilon_degenerate: eps.degenerate,
        f1,
        f2,
        phi_on_f1: on_f1.holds,
        phi_on_f2: on_f2.holds,
        target_on_f1,
        target_on_f2,
        witnesses_f1: on_f1.witnesses,
        witnesses_f2: on_f2.witnesses,
        mismatch_signal,
    })
}
