//! Truth sets of formulas over signals under the two-disjunct (`Old`) and
//! three-disjunct (`New`) Release semantics.

mod oracle;

pub use oracle::{oracle_sat, Oracle};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{nnf, to_old, Dag, Formula, Node, NodeId};
use crate::signal::Signal;
use crate::time::{int, midpoint, Interval, IntervalSet, Rational, TimeBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Old,
    New,
}

impl Semantics {
    pub const BOTH: [Semantics; 2] = [Semantics::Old, Semantics::New];
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Old => "old",
            Semantics::New => "new",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "old" => Ok(Semantics::Old),
            "new" => Ok(Semantics::New),
            other => Err(format!("unknown semantics `{other}`")),
        }
    }
}

/// Memoizing evaluator for one signal and one semantics.
pub struct Evaluator<'a> {
    signal: &'a Signal,
    sem: Semantics,
    dag: Dag,
    memo: HashMap<NodeId, IntervalSet>,
}

impl<'a> Evaluator<'a> {
    pub fn new(signal: &'a Signal, sem: Semantics) -> Self {
        Evaluator { signal, sem, dag: Dag::default(), memo: HashMap::new() }
    }

    pub fn truth_set(&mut self, phi: &Formula) -> IntervalSet {
        let id = self.dag.insert(phi);
        self.eval(id)
    }

    /// Every truth set computed so far, one per distinct subformula.
    pub fn computed_sets(&self) -> impl Iterator<Item = &IntervalSet> {
        self.memo.values()
    }

    fn eval(&mut self, id: NodeId) -> IntervalSet {
        if let Some(s) = self.memo.get(&id) {
            return s.clone();
        }
        let out = match self.dag.node(id).clone() {
            Node::Top => IntervalSet::nonneg(),
            Node::Bottom => IntervalSet::empty(),
            Node::Atom(p) => self.signal.atom_truth_set(&p),
            Node::Not(a) => self.eval(a).complement(),
            Node::Or(a, b) => self.eval(a).union(&self.eval(b)),
            Node::And(a, b) => self.eval(a).intersect(&self.eval(b)),
            Node::Until(a, b, i) => until_set(&self.eval(a), &self.eval(b), &i),
            Node::Release(a, b, i) => release_set(&self.eval(a), &self.eval(b), &i, self.sem),
        };
        self.memo.insert(id, out.clone());
        out
    }
}

fn closure(i: &Interval) -> Interval {
    Interval::new(i.lo().clone(), true, i.hi().clone(), true)
}

fn until_set(s1: &IntervalSet, s2: &IntervalSet, i: &Interval) -> IntervalSet {
    let mut out = if i.contains(&Rational::zero()) { s2.clone() } else { IntervalSet::empty() };
    let back = i.intersect(&Interval::positive()).neg();
    for c in s1.members() {
        let cc = closure(c);
        let reach = s2.intersect_interval(&cc).minkowski_add(&back).intersect_interval(&cc);
        out = out.union(&reach);
    }
    out.nonneg_part()
}

/// First time in `window` where `s2` fails, and whether it is attained.
fn first_failure(bad2: &IntervalSet, window: &Interval) -> Option<(Rational, bool)> {
    let hit = bad2.intersect_interval(window);
    let m = hit.members().first()?;
    let e = m.lo().finite().expect("failures lie in [0, inf)").clone();
    Some((e, m.lo_closed()))
}

/// Some `t1 > 0` with `phi1` at `t + t1` and `phi2` on `[t, t + t1] ∩ (t + I)`.
fn release_trigger(t: &Rational, s1: &IntervalSet, bad2: &IntervalSet, i: &Interval) -> bool {
    let window = match first_failure(bad2, &i.shift(t)) {
        None => Interval::greater_than(t.clone()),
        Some((e, attained)) => Interval::new(t.clone().into(), false, e.into(), !attained),
    };
    s1.intersects_interval(&window)
}

/// Some `t1 ∈ closeL(t + I)`, `t1 < sup(t + I)`, with `phi2` on `(t + I) ∩ (-inf, t1]`
/// and `phi1` just right of `t1`.
fn release_handover(t: &Rational, next1: &IntervalSet, bad2: &IntervalSet, i: &Interval) -> bool {
    let j = i.shift(t);
    if j.is_empty() {
        return false;
    }
    let mut window = j.open_right_close_left();
    if let Some((e, attained)) = first_failure(bad2, &j) {
        window = window.intersect(&Interval::new(TimeBound::NegInf, false, e.into(), !attained));
    }
    next1.intersects_interval(&window)
}

fn release_set(s1: &IntervalSet, s2: &IntervalSet, i: &Interval, sem: Semantics) -> IntervalSet {
    let bad2 = s2.complement();
    let always = bad2.minkowski_add(&i.neg()).complement();
    let next1 = next_truth_set(s1);
    let holds = |t: &Rational| {
        release_trigger(t, s1, &bad2, i) || (sem == Semantics::New && release_handover(t, &next1, &bad2, i))
    };

    // Both disjuncts are constant between consecutive critical times.
    let offsets: Vec<Rational> = [TimeBound::zero(), i.inf(), i.sup()]
        .iter()
        .filter_map(|b| b.finite().cloned())
        .collect();
    let mut cands = vec![Rational::zero()];
    for x in s1.breakpoints().iter().chain(s2.breakpoints().iter()) {
        for e in &offsets {
            if x >= e {
                cands.push(x - e);
            }
        }
    }
    cands.sort();
    cands.dedup();

    let mut pieces = Vec::new();
    for (k, c) in cands.iter().enumerate() {
        if holds(c) {
            pieces.push(Interval::point(c.clone()));
        }
        let (cell, sample) = match cands.get(k + 1) {
            Some(d) => (Interval::open(c.clone(), d.clone()), midpoint(c, d)),
            None => (Interval::greater_than(c.clone()), c + int(1)),
        };
        if holds(&sample) {
            pieces.push(cell);
        }
    }
    always.union(&IntervalSet::from_intervals(pieces))
}

pub fn truth_set(f: &Signal, phi: &Formula, sem: Semantics) -> IntervalSet {
    Evaluator::new(f, sem).truth_set(phi)
}

pub fn sat(f: &Signal, phi: &Formula, sem: Semantics) -> bool {
    truth_set(f, phi, sem).starts_at_zero()
}

/// `{t : (t, t + e) ⊆ s for some e > 0}`
pub fn next_truth_set(s: &IntervalSet) -> IntervalSet {
    s.members()
        .iter()
        .filter(|m| m.width() > TimeBound::zero())
        .map(|m| Interval::new(m.lo().clone(), true, m.hi().clone(), false))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("left finite variability needs a positive time, got {0}")]
pub struct FvarError(pub Rational);

/// Finite variability of `s` at `r`: if `s` has points arbitrarily close to
/// `r` on `side`, it holds on a whole one-sided neighbourhood.
pub fn fvar_at(s: &IntervalSet, r: &Rational, side: Side) -> Result<bool, FvarError> {
    let (accumulates, settles) = match side {
        Side::Right => {
            let after = s.intersect_interval(&Interval::greater_than(r.clone()));
            (after.inf() == TimeBound::Finite(r.clone()), s.holds_right_of(r))
        }
        Side::Left => {
            if !r.is_zero() && *r > Rational::zero() {
                let before = s.intersect_interval(&Interval::closed_open(Rational::zero(), r.clone()));
                (before.sup() == TimeBound::Finite(r.clone()), s.holds_left_of(r))
            } else {
                return Err(FvarError(r.clone()));
            }
        }
    };
    Ok(!accumulates || settles)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub formula: String,
    pub semantics: Semantics,
    pub set_phi: IntervalSet,
    pub set_nnf: IntervalSet,
    pub equal: bool,
    pub mismatch: IntervalSet,
}

/// Compares `phi` with its negation normal form under each semantics,
/// `Old` first.
pub fn duality_check(f: &Signal, phi: &Formula) -> [DualityReport; 2] {
    let normal = nnf(phi);
    Semantics::BOTH.map(|sem| {
        let mut ev = Evaluator::new(f, sem);
        let set_phi = ev.truth_set(phi);
        let set_nnf = ev.truth_set(&normal);
        let mismatch = set_phi.symmetric_difference(&set_nnf);
        DualityReport {
            formula: phi.to_string(),
            semantics: sem,
            equal: mismatch.is_empty(),
            set_phi,
            set_nnf,
            mismatch,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub formula: String,
    pub translated: String,
    pub set_new: IntervalSet,
    pub set_old_translated: IntervalSet,
    pub equal: bool,
    pub mismatch: IntervalSet,
}

/// `New` truth set of `phi` against the `Old` truth set of `to_old(phi)`.
pub fn bridge_check(f: &Signal, phi: &Formula) -> BridgeReport {
    let translated = to_old(phi);
    let set_new = truth_set(f, phi, Semantics::New);
    let set_old_translated = truth_set(f, &translated, Semantics::Old);
    let mismatch = set_new.symmetric_difference(&set_old_translated);
    BridgeReport {
        formula: phi.to_string(),
        translated: translated.to_string(),
        equal: mismatch.is_empty(),
        set_new,
        set_old_translated,
        mismatch,
    }
}

/// Breakpoints of every subformula truth set and of the signal, their
/// midpoints, and one point past the last.
pub fn critical_grid(f: &Signal, phi: &Formula, sem: Semantics) -> Vec<Rational> {
    let mut ev = Evaluator::new(f, sem);
    ev.truth_set(phi);
    let mut points = f.breakpoints();
    for s in ev.computed_sets() {
        points.extend(s.breakpoints());
    }
    points.retain(|p| *p >= Rational::zero());
    points.sort();
    points.dedup();
    let mut grid = Vec::with_capacity(2 * points.len() + 1);
    for w in points.windows(2) {
        grid.push(w[0].clone());
        grid.push(midpoint(&w[0], &w[1]));
    }
    let last = points.last().cloned().unwrap_or_else(Rational::zero);
    grid.push(last.clone());
    grid.push(last + int(1));
    grid
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub formula: String,
    pub semantics: Semantics,
    #[serde(with = "crate::time::serde_rational")]
    pub time: Rational,
    pub engine: bool,
    pub oracle: bool,
}

/// Checks the engine against the pointwise oracle on the critical grid, for
/// `phi` and every subformula.
pub fn agreement_check(f: &Signal, phi: &Formula, sem: Semantics) -> Result<usize, Disagreement> {
    let grid = critical_grid(f, phi, sem);
    let mut ev = Evaluator::new(f, sem);
    let mut oracle = Oracle::new(f, sem);
    let mut subs = Vec::new();
    phi.walk(&mut |g| subs.push(g));
    let mut checked = 0;
    for g in subs {
        let set = ev.truth_set(g);
        for t in &grid {
            let engine = set.contains(t);
            let expected = oracle.sat_at(g, t);
            if engine != expected {
                return Err(Disagreement { formula: g.to_string(), semantics: sem, time: t.clone(), engine, oracle: expected });
            }
            checked += 1;
        }
    }
    Ok(checked)
}
