//! Step sizes, witnesses and proof sets for bounded Until and Release, the
//! partition of a truth set within one step, and clock counts.

mod span;

pub use span::Span;

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{truth_set, Semantics};
use crate::formula::Formula;
use crate::signal::Signal;
use crate::time::{int, midpoint, serde_rational, Interval, IntervalSet, Rational, TimeBound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("step size needs a non-empty bounded interval with positive infimum, got {0}")]
    StepUndefined(Interval),
    #[error("no witness of kind {0}")]
    InvalidKind(u8),
    #[error("witness extraction left {0} uncovered")]
    ExtractionFailed(IntervalSet),
}

/// Width if it is smaller than the infimum, otherwise the infimum.
pub fn step(i: &Interval) -> Result<Rational, WitnessError> {
    let undefined = || WitnessError::StepUndefined(i.clone());
    if i.is_empty() {
        return Err(undefined());
    }
    let a = i.lo().finite().ok_or_else(undefined)?;
    let b = i.hi().finite().ok_or_else(undefined)?;
    if !a.is_positive() {
        return Err(undefined());
    }
    let width = b - a;
    Ok(if &width < a { width } else { a.clone() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockBound {
    pub obligations: u64,
    pub until_clock_bound: u64,
    pub conservative_bound: u64,
}

/// Simultaneous proof obligations `ceil(inf / step) + 1` and the clock
/// counts at two and four clocks per obligation.
pub fn clock_bound(i: &Interval) -> Result<ClockBound, WitnessError> {
    let s = step(i)?;
    if s.is_zero() {
        return Err(WitnessError::StepUndefined(i.clone()));
    }
    let ratio = i.lo().finite().expect("step checked the bound") / &s;
    let obligations: u64 = u64::try_from(ratio.ceil().to_integer()).expect("obligation count fits in u64") + 1;
    Ok(ClockBound { obligations, until_clock_bound: 2 * obligations, conservative_bound: 4 * obligations })
}

/// Truth sets of the two operands under the three-disjunct semantics.
#[derive(Debug, Clone)]
pub struct Operands {
    pub s1: IntervalSet,
    pub s2: IntervalSet,
}

impl Operands {
    pub fn new(f: &Signal, phi1: &Formula, phi2: &Formula) -> Operands {
        Operands { s1: truth_set(f, phi1, Semantics::New), s2: truth_set(f, phi2, Semantics::New) }
    }

    fn breakpoints(&self) -> Vec<Rational> {
        let mut v = self.s1.breakpoints();
        v.extend(self.s2.breakpoints());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UntilWitness {
    #[serde(with = "serde_rational")]
    pub r: Rational,
    #[serde(with = "serde_rational")]
    pub w: Rational,
    pub kind: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseWitness {
    pub interval: Span,
    pub kind: u8,
}

impl Operands {
    pub fn until_holds(&self, r: &Rational, w: &Rational, kind: u8) -> Result<bool, WitnessError> {
        let between = Interval::open(r.clone(), w.clone());
        Ok(match kind {
            1 => r <= w && self.s1.contains_interval(&between) && self.s2.contains(w),
            2 => r < w && self.s1.contains_interval(&between) && self.s2.holds_left_of(w),
            3 => {
                r < w
                    && self.s1.contains_interval(&Interval::open_closed(r.clone(), w.clone()))
                    && self.s1.holds_right_of(w)
                    && self.s2.holds_right_of(w)
            }
            k => return Err(WitnessError::InvalidKind(k)),
        })
    }

    pub fn until_proof_set(&self, r: &Rational, w: &Rational, i: &Interval, kind: u8) -> Result<IntervalSet, WitnessError> {
        if !self.until_holds(r, w, kind)? {
            return Ok(IntervalSet::empty());
        }
        let offsets = match kind {
            1 => i.clone(),
            2 => i.open_left_close_right(),
            _ => i.open_right_close_left(),
        };
        let times = offsets.neg().shift(w).intersect(&Interval::at_least(r.clone()));
        Ok(IntervalSet::from(times).nonneg_part())
    }

    pub fn release_holds(&self, span: &Span, kind: u8) -> Result<bool, WitnessError> {
        let set = span.set();
        let sup = span.hi().finite();
        Ok(match kind {
            1 => self.s2.contains_interval(&set),
            2 => !set.is_empty() && span.is_left_closed() && self.s1.contains_interval(&set),
            3 => {
                !set.is_empty()
                    && span.is_right_closed()
                    && self.s2.contains_interval(&set)
                    && sup.is_some_and(|s| self.s1.contains(s))
            }
            4 => {
                !span.close_left().is_empty()
                    && span.is_right_closed()
                    && self.s2.contains_interval(&set)
                    && sup.is_none_or(|s| self.s1.holds_right_of(s))
            }
            k => return Err(WitnessError::InvalidKind(k)),
        })
    }

    pub fn release_proof_set(&self, span: &Span, j: &Interval, kind: u8) -> Result<IntervalSet, WitnessError> {
        if !self.release_holds(span, kind)? {
            return Ok(IntervalSet::empty());
        }
        let below_sup = |closed: bool| Interval::new(TimeBound::NegInf, false, span.hi().clone(), closed);
        let times = match kind {
            1 => containment_shifts(j, &span.set()),
            2 => {
                if j.inf() <= TimeBound::zero() {
                    Interval::empty()
                } else {
                    containment_shifts(j, &Interval::greater_than(span.lo().clone())).intersect(&below_sup(false))
                }
            }
            3 => containment_shifts(j, &span.up_closure()).intersect(&below_sup(false)),
            _ => containment_shifts(j, &span.up_closure()).intersect(&below_sup(true)),
        };
        Ok(IntervalSet::from(times).nonneg_part())
    }
}

/// `{t : t + j ⊆ k}`
fn containment_shifts(j: &Interval, k: &Interval) -> Interval {
    if j.is_empty() {
        return Interval::whole_line();
    }
    if k.is_empty() {
        return Interval::empty();
    }
    let lo = k.lo().sub(j.lo()).unwrap_or(TimeBound::NegInf);
    let hi = k.hi().sub(j.hi()).unwrap_or(TimeBound::PosInf);
    Interval::new(lo, k.lo_closed() || !j.lo_closed(), hi, k.hi_closed() || !j.hi_closed())
}

pub fn until_witness_holds(
    f: &Signal,
    phi1: &Formula,
    phi2: &Formula,
    r: &Rational,
    w: &Rational,
    kind: u8,
) -> Result<bool, WitnessError> {
    Operands::new(f, phi1, phi2).until_holds(r, w, kind)
}

pub fn until_proof_set(
    f: &Signal,
    phi1: &Formula,
    phi2: &Formula,
    r: &Rational,
    w: &Rational,
    i: &Interval,
    kind: u8,
) -> Result<IntervalSet, WitnessError> {
    Operands::new(f, phi1, phi2).until_proof_set(r, w, i, kind)
}

pub fn release_witness_holds(f: &Signal, phi1: &Formula, phi2: &Formula, span: &Span, kind: u8) -> Result<bool, WitnessError> {
    Operands::new(f, phi1, phi2).release_holds(span, kind)
}

pub fn release_proof_set(
    f: &Signal,
    phi1: &Formula,
    phi2: &Formula,
    span: &Span,
    j: &Interval,
    kind: u8,
) -> Result<IntervalSet, WitnessError> {
    Operands::new(f, phi1, phi2).release_proof_set(span, j, kind)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Until(UntilWitness),
    Release(ReleaseWitness),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPart {
    /// 1-based position of the part: `T1, T2, ...` in order.
    pub role: usize,
    pub interval: Interval,
    pub witness: Witness,
    pub proof_set: IntervalSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub formula: String,
    #[serde(with = "serde_rational")]
    pub step: Rational,
    /// Truth set restricted to `[0, step)`.
    pub window_set: IntervalSet,
    /// Non-empty parts only, in order.
    pub parts: Vec<PartitionPart>,
}

impl PartitionReport {
    pub fn intervals(&self) -> Vec<&Interval> {
        self.parts.iter().map(|p| &p.interval).collect()
    }
}

/// The part of `m` covered by `proof`, if it starts where `m` starts.
fn prefix(m: &Interval, proof: &IntervalSet) -> Option<Interval> {
    proof
        .members()
        .iter()
        .map(|p| p.intersect(m))
        .find(|piece| !piece.is_empty() && piece.lower_key() == m.lower_key())
}

fn is_longer(a: &Interval, b: &Option<(Interval, Witness, IntervalSet)>) -> bool {
    match b {
        None => true,
        Some((best, _, _)) => a.upper_key() > best.upper_key(),
    }
}

/// Sorted candidates with midpoints and one point beyond the last.
fn refine(mut points: Vec<Rational>) -> Vec<Rational> {
    points.sort();
    points.dedup();
    let mut out = Vec::with_capacity(2 * points.len() + 1);
    for w in points.windows(2) {
        out.push(w[0].clone());
        out.push(midpoint(&w[0], &w[1]));
    }
    if let Some(last) = points.last() {
        out.push(last.clone());
        out.push(last + int(1));
    }
    out
}

type Choice = Option<(Interval, Witness, IntervalSet)>;

/// Covers as long a prefix of the remaining truth set as possible with one
/// witness per role, roles in order. Taking a longer prefix never hurts a
/// later role, so the greedy choice is optimal.
fn extract(
    window_set: &IntervalSet,
    roles: usize,
    mut best: impl FnMut(usize, &Interval) -> Result<Choice, WitnessError>,
) -> Result<Vec<PartitionPart>, WitnessError> {
    let mut queue: VecDeque<Interval> = window_set.members().iter().cloned().collect();
    let mut parts = Vec::new();
    for role in 1..=roles {
        let Some(front) = queue.front().cloned() else { break };
        if let Some((piece, witness, proof_set)) = best(role, &front)? {
            let rest = Interval::new(piece.hi().clone(), !piece.hi_closed(), front.hi().clone(), front.hi_closed());
            if rest.is_empty() {
                queue.pop_front();
            } else {
                queue[0] = rest;
            }
            parts.push(PartitionPart { role, interval: piece, witness, proof_set });
        }
    }
    if queue.is_empty() {
        Ok(parts)
    } else {
        Err(WitnessError::ExtractionFailed(queue.into_iter().collect()))
    }
}

fn window(f: &Signal, phi: &Formula, s: &Rational) -> IntervalSet {
    truth_set(f, phi, Semantics::New).intersect_interval(&Interval::closed_open(Rational::zero(), s.clone()))
}

/// Splits the truth set of `phi1 U_i phi2` on `[0, step(i))` into at most two
/// ordered intervals, each with a witness point whose proof set covers it.
pub fn until_partition(f: &Signal, phi1: &Formula, phi2: &Formula, i: &Interval) -> Result<PartitionReport, WitnessError> {
    let s = step(i)?;
    let ops = Operands::new(f, phi1, phi2);
    let phi = Formula::until(phi1.clone(), phi2.clone(), i.clone());
    let window_set = window(f, &phi, &s);
    let (a, b) = (i.lo().finite().expect("bounded").clone(), i.hi().finite().expect("bounded").clone());
    let parts = extract(&window_set, 2, |role, m| {
        let r = m.lo().finite().expect("window is bounded").clone();
        let end = m.hi().finite().expect("window is bounded").clone();
        let mut points = ops.breakpoints();
        points.extend([&r + &a, &r + &b, &end + &a, &end + &b, r.clone()]);
        points.retain(|x| *x >= r);
        let kinds: &[u8] = if role == 1 { &[1, 2] } else { &[1, 3] };
        let mut chosen: Choice = None;
        for w in refine(points) {
            let offset = &w - &r;
            for &kind in kinds {
                let allowed = if role == 1 && kind == 1 { i.contains(&offset) } else { i.close_right().contains(&offset) };
                if !allowed {
                    continue;
                }
                let proof = ops.until_proof_set(&r, &w, i, kind)?;
                if let Some(piece) = prefix(m, &proof) {
                    if is_longer(&piece, &chosen) {
                        let witness = Witness::Until(UntilWitness { r: r.clone(), w: w.clone(), kind });
                        chosen = Some((piece, witness, proof));
                    }
                }
            }
        }
        Ok(chosen)
    })?;
    Ok(PartitionReport { formula: phi.to_string(), step: s, window_set, parts })
}

/// All spans with endpoints among `points` and every closedness, narrowest
/// first.
fn spans(points: &[Rational]) -> Vec<Span> {
    let mut out = Vec::new();
    for (k, x) in points.iter().enumerate() {
        for y in &points[k..] {
            for (lc, hc) in [(true, true), (true, false), (false, true), (false, false)] {
                out.push(Span::new(x.clone(), lc, y.clone().into(), hc));
            }
        }
    }
    out.sort_by(|p, q| {
        let wp = p.hi().sub(&p.lo().clone().into());
        let wq = q.hi().sub(&q.lo().clone().into());
        wp.cmp(&wq)
            .then_with(|| p.lo().cmp(q.lo()))
            .then_with(|| p.lo_closed().cmp(&q.lo_closed()))
            .then_with(|| p.hi_closed().cmp(&q.hi_closed()))
    });
    out
}

fn within(span: &Span, region: &Interval) -> bool {
    let set = span.set();
    if set.is_empty() {
        region.contains(span.lo())
    } else {
        region.contains_interval(&set)
    }
}

/// Splits the truth set of `phi1 R_j phi2` on `[0, step(j))` into at most four
/// ordered intervals, each with a witness interval whose proof set covers it.
pub fn release_partition(f: &Signal, phi1: &Formula, phi2: &Formula, j: &Interval) -> Result<PartitionReport, WitnessError> {
    let s = step(j)?;
    let ops = Operands::new(f, phi1, phi2);
    let phi = Formula::release(phi1.clone(), phi2.clone(), j.clone());
    let window_set = window(f, &phi, &s);
    let (a, b) = (j.lo().finite().expect("bounded").clone(), j.hi().finite().expect("bounded").clone());
    let early = Interval::open(Rational::zero(), s.clone());
    let late = Interval::closed_open(s.clone(), &s + &b);
    let parts = extract(&window_set, 4, |role, m| {
        let start = m.lo().finite().expect("window is bounded").clone();
        let end = m.hi().finite().expect("window is bounded").clone();
        let region = if role == 1 { &early } else { &late };
        let mut points = ops.breakpoints();
        points.extend([Rational::zero(), s.clone(), &s + &b, &start + &a, &start + &b, &end + &a, &end + &b]);
        let hull = Interval::closed(Rational::zero(), &s + &b);
        let points: Vec<Rational> = refine(points).into_iter().filter(|x| hull.contains(x)).collect();
        let kinds: &[u8] = match role {
            1 => &[2],
            2 => &[1],
            3 => &[4],
            _ => &[2, 3, 4],
        };
        let mut chosen: Choice = None;
        for &kind in kinds {
            for span in spans(&points) {
                if !within(&span, region) {
                    continue;
                }
                let proof = ops.release_proof_set(&span, j, kind)?;
                if let Some(piece) = prefix(m, &proof) {
                    if is_longer(&piece, &chosen) {
                        let witness = Witness::Release(ReleaseWitness { interval: span, kind });
                        chosen = Some((piece, witness, proof));
                    }
                }
            }
        }
        Ok(chosen)
    })?;
    Ok(PartitionReport { formula: phi.to_string(), step: s, window_set, parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::time::rat;

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    fn staircase() -> Signal {
        Signal::from_text(&[("[0,1]", &["p"]), ("(1,2]", &["p", "q"]), ("(2,inf)", &[])]).unwrap()
    }

    #[test]
    fn step_sizes() {
        assert_eq!(step(&iv("[3,4]")), Ok(int(1)));
        assert_eq!(step(&iv("[1,2]")), Ok(int(1)));
        assert_eq!(step(&iv("[1/100,1/50]")), Ok(rat(1, 100)));
        assert!(step(&iv("[0,2]")).is_err());
        assert!(step(&iv("[1,inf)")).is_err());
        assert!(step(&Interval::empty()).is_err());
    }

    #[test]
    fn clock_counts() {
        let c = clock_bound(&iv("[1,2]")).unwrap();
        assert_eq!((c.obligations, c.until_clock_bound, c.conservative_bound), (2, 4, 8));
        assert_eq!(clock_bound(&iv("[1/100,1/50]")).unwrap().conservative_bound, 8);
        assert_eq!(clock_bound(&iv("[3,4]")).unwrap().obligations, 4);
        assert!(clock_bound(&iv("[2,2]")).is_err());
    }

    #[test]
    fn until_witnesses() {
        let (p, q) = (parse("p").unwrap(), parse("q").unwrap());
        let both = Signal::constant(&["p", "q"]);
        assert_eq!(until_witness_holds(&both, &p, &q, &int(0), &int(0), 1), Ok(true));
        let f = staircase();
        assert_eq!(until_witness_holds(&f, &p, &q, &int(0), &rat(3, 2), 1), Ok(true));
        assert_eq!(until_witness_holds(&f, &p, &q, &int(0), &int(1), 2), Ok(false));
        assert!(until_witness_holds(&f, &p, &q, &int(0), &int(1), 4).is_err());
        let proof = until_proof_set(&f, &p, &q, &int(0), &rat(3, 2), &iv("[1,2]"), 1).unwrap();
        assert_eq!(proof, iv("[0,1/2]").into());
    }

    #[test]
    fn until_partition_example() {
        let (p, q) = (parse("p").unwrap(), parse("q").unwrap());
        let report = until_partition(&staircase(), &p, &q, &iv("[1,2]")).unwrap();
        assert_eq!(report.intervals(), vec![&iv("[0,1)")]);
        let never = until_partition(&staircase(), &p, &parse("false").unwrap(), &iv("[1,2]")).unwrap();
        assert!(never.parts.is_empty());
    }

    #[test]
    fn release_witnesses() {
        let (p, q) = (parse("p").unwrap(), parse("q").unwrap());
        let f = staircase();
        let empty: Span = "(1,1)".parse().unwrap();
        assert_eq!(release_witness_holds(&f, &p, &q, &empty, 1), Ok(true));
        let at_three: Span = "[1,3]".parse().unwrap();
        assert_eq!(release_witness_holds(&f, &q, &p, &at_three, 3), Ok(false));
        let k1: Span = "[1,4]".parse().unwrap();
        let all = Signal::constant(&["p", "q"]);
        assert_eq!(release_proof_set(&all, &p, &q, &k1, &iv("[1,2]"), 1), Ok(iv("[0,2]").into()));
    }

    #[test]
    fn release_partition_examples() {
        let (p, q) = (parse("p").unwrap(), parse("q").unwrap());
        let all = Signal::constant(&["p", "q"]);
        let report = release_partition(&all, &p, &q, &iv("[1,2]")).unwrap();
        assert_eq!(report.window_set, iv("[0,1)").into());
        let none = Signal::constant(&[] as &[&str]);
        assert!(release_partition(&none, &p, &q, &iv("[1,2]")).unwrap().parts.is_empty());
    }

    #[test]
    fn degenerate_release_witness() {
        let f = Signal::from_text(&[("[0,3/2]", &[]), ("(3/2,inf)", &["p"])]).unwrap();
        let (p, q) = (parse("p").unwrap(), parse("q").unwrap());
        let j = iv("(1,2]");
        let report = release_partition(&f, &p, &q, &j).unwrap();
        assert_eq!(report.window_set, iv("[1/2,1)").into());
        let Witness::Release(w) = &report.parts[0].witness else { panic!("release witness expected") };
        assert_eq!((w.interval.to_string().as_str(), w.kind), ("(3/2,3/2]", 4));
    }
}
