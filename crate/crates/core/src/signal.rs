//! Finitely variable signals: a finite partition of `[0, inf)` into
//! segments, each carrying the set of propositions true on it.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::time::{rat, Interval, IntervalSet, ParseIntervalError, Rational, TimeBound};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub interval: Interval,
    pub props: BTreeSet<String>,
}

impl Segment {
    pub fn new<S: AsRef<str>>(interval: Interval, props: &[S]) -> Segment {
        Segment { interval, props: props.iter().map(|p| p.as_ref().to_string()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignalError {
    #[error("gap at {0}")]
    Gap(Interval),
    #[error("overlap at {0}")]
    Overlap(Interval),
    #[error("last segment ends at {0}; the signal must extend to infinity")]
    MissingTail(TimeBound),
    #[error("segment {0} is empty")]
    EmptySegment(usize),
    #[error("segment {0} covers negative time")]
    NegativeTime(Interval),
    #[error("time {0} is negative")]
    NegativeArgument(Rational),
    #[error(transparent)]
    Interval(#[from] ParseIntervalError),
    #[error("malformed signal document: {0}")]
    Format(String),
}

/// A valid signal in canonical form: adjacent segments carry different sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signal {
    segments: Vec<Segment>,
}

impl Signal {
    /// Checks that the segments partition `[0, inf)` and merges equal neighbours.
    pub fn validate(mut raw: Vec<Segment>) -> Result<Signal, SignalError> {
        if let Some(k) = raw.iter().position(|s| s.interval.is_empty()) {
            return Err(SignalError::EmptySegment(k));
        }
        if let Some(s) = raw.iter().find(|s| s.interval.inf() < TimeBound::zero()) {
            return Err(SignalError::NegativeTime(s.interval.clone()));
        }
        raw.sort_by(|a, b| a.interval.lower_key().cmp(&b.interval.lower_key()));
        let mut covered = TimeBound::zero();
        let mut covered_closed = false;
        let mut merged: Vec<Segment> = Vec::with_capacity(raw.len());
        for seg in raw {
            let i = &seg.interval;
            let gap = Interval::new(covered.clone(), !covered_closed, i.lo().clone(), !i.lo_closed());
            if !gap.is_empty() {
                return Err(SignalError::Gap(gap));
            }
            let before = Interval::new(TimeBound::NegInf, false, covered.clone(), covered_closed);
            let overlap = i.intersect(&before);
            if !overlap.is_empty() {
                return Err(SignalError::Overlap(overlap));
            }
            covered = i.hi().clone();
            covered_closed = i.hi_closed();
            match merged.last_mut() {
                Some(last) if last.props == seg.props => last.interval = last.interval.hull(i),
                _ => merged.push(seg),
            }
        }
        if covered != TimeBound::PosInf {
            return Err(SignalError::MissingTail(covered));
        }
        Ok(Signal { segments: merged })
    }

    /// Builds from textual intervals, e.g. `[("[0,1]", &["p"]), ("(1,inf)", &["q"])]`.
    pub fn from_text(parts: &[(&str, &[&str])]) -> Result<Signal, SignalError> {
        let mut raw = Vec::with_capacity(parts.len());
        for (interval, props) in parts {
            raw.push(Segment::new(interval.parse()?, props));
        }
        Signal::validate(raw)
    }

    pub fn constant<S: AsRef<str>>(props: &[S]) -> Signal {
        Signal { segments: vec![Segment::new(Interval::nonneg(), props)] }
    }

    pub fn from_json(text: &str) -> Result<Signal, SignalError> {
        serde_json::from_str(text).map_err(|e| SignalError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("signals always serialize")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    fn segment_at(&self, t: &Rational) -> &Segment {
        self.segments
            .iter()
            .find(|s| s.interval.contains(t))
            .expect("segments cover [0, inf)")
    }

    pub fn value_at(&self, t: &Rational) -> Result<&BTreeSet<String>, SignalError> {
        if t.is_negative() {
            return Err(SignalError::NegativeArgument(t.clone()));
        }
        Ok(&self.segment_at(t).props)
    }

    /// `t -> f(r + t)`.
    pub fn shift(&self, r: &Rational) -> Result<Signal, SignalError> {
        if r.is_negative() {
            return Err(SignalError::NegativeArgument(r.clone()));
        }
        let window = Interval::at_least(r.clone());
        let neg = -r;
        let raw = self
            .segments
            .iter()
            .map(|s| Segment { interval: s.interval.intersect(&window).shift(&neg), props: s.props.clone() })
            .filter(|s| !s.interval.is_empty())
            .collect();
        Signal::validate(raw)
    }

    pub fn atom_truth_set(&self, p: &str) -> IntervalSet {
        self.segments.iter().filter(|s| s.props.contains(p)).map(|s| s.interval.clone()).collect()
    }

    /// Finite segment endpoints in increasing order (always includes 0).
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .segments
            .iter()
            .flat_map(|s| [s.interval.lo().finite().cloned(), s.interval.hi().finite().cloned()])
            .flatten()
            .collect();
        out.push(Rational::zero());
        out.sort();
        out.dedup();
        out
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        self.segments.iter().flat_map(|s| s.props.iter().cloned()).collect()
    }
}

impl Serialize for Signal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.segments.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Signal::validate(Vec::<Segment>::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Reproducible signal with at most `max_segments` segments before merging
/// and breakpoints on the quarter lattice in `(0, horizon]`.
pub fn random_signal(seed: u64, max_segments: usize, horizon: &Rational, props: &[&str]) -> Signal {
    random_signal_with(&mut ChaCha8Rng::seed_from_u64(seed), max_segments, horizon, props)
}

pub fn random_signal_with<R: Rng>(rng: &mut R, max_segments: usize, horizon: &Rational, props: &[&str]) -> Signal {
    assert!(max_segments >= 1, "a signal needs at least one segment");
    let quarter = rat(1, 4);
    let steps: i64 = (horizon / &quarter).floor().to_integer().try_into().unwrap_or(i64::MAX).max(1);
    let draw_props = |rng: &mut R| -> Vec<&str> { props.iter().copied().filter(|_| rng.gen_bool(0.5)).collect() };

    let wanted = rng.gen_range(1..=max_segments);
    let mut grid: Vec<i64> = (1..=steps).collect();
    grid.shuffle(rng);
    let mut cuts: Vec<i64> = grid.into_iter().take(wanted - 1).collect();
    cuts.sort();

    let mut raw = Vec::new();
    let mut start = TimeBound::zero();
    let mut start_closed = true;
    let mut used = 1;
    for k in cuts {
        let b = &quarter * Rational::from_integer(k.into());
        let singleton = used + 2 <= wanted && rng.gen_bool(0.25);
        let end_closed = !singleton && rng.gen_bool(0.5);
        raw.push(Segment::new(Interval::new(start, start_closed, b.clone().into(), end_closed), &draw_props(rng)));
        if singleton {
            raw.push(Segment::new(Interval::point(b.clone()), &draw_props(rng)));
            used += 1;
        }
        start = b.into();
        start_closed = !singleton && !end_closed;
        used += 1;
        if used >= wanted {
            break;
        }
    }
    raw.push(Segment::new(Interval::new(start, start_closed, TimeBound::PosInf, false), &draw_props(rng)));
    Signal::validate(raw).expect("generated segments partition [0, inf)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::int;

    fn example() -> Signal {
        Signal::from_text(&[("[0,1]", &["p"]), ("(1,inf)", &["q"])]).unwrap()
    }

    #[test]
    fn validation_outcomes() {
        assert!(Signal::from_text(&[("[0,1]", &["p"]), ("(1,inf)", &["q"])]).is_ok());
        assert_eq!(
            Signal::from_text(&[("[0,1]", &["p"]), ("(2,inf)", &["q"])]),
            Err(SignalError::Gap("(1,2]".parse().unwrap()))
        );
        let merged = Signal::from_text(&[("[0,1]", &["p"]), ("[1,inf)", &["p"])]);
        assert_eq!(merged, Err(SignalError::Overlap("[1,1]".parse().unwrap())));
        let merged = Signal::from_text(&[("[0,1)", &["p"]), ("[1,inf)", &["p"])]).unwrap();
        assert_eq!(merged, Signal::constant(&["p"]));
        assert!(matches!(Signal::from_text(&[("[0,1]", &["p"])]), Err(SignalError::MissingTail(_))));
        assert!(matches!(Signal::from_text(&[("(0,inf)", &["p"])]), Err(SignalError::Gap(_))));
    }

    #[test]
    fn values_and_shift() {
        let f = example();
        assert_eq!(f.value_at(&int(1)).unwrap().iter().collect::<Vec<_>>(), vec!["p"]);
        assert_eq!(f.value_at(&rat(3, 2)).unwrap().iter().collect::<Vec<_>>(), vec!["q"]);
        assert!(f.value_at(&int(-1)).is_err());
        assert_eq!(f.shift(&int(0)).unwrap(), f);
        assert_eq!(f.shift(&int(1)).unwrap(), Signal::from_text(&[("[0,0]", &["p"]), ("(0,inf)", &["q"])]).unwrap());
        assert_eq!(f.shift(&int(7)).unwrap(), Signal::constant(&["q"]));
    }

    #[test]
    fn truth_sets() {
        let f = example();
        assert_eq!(f.atom_truth_set("p"), "[0,1]".parse::<Interval>().unwrap().into());
        assert_eq!(f.atom_truth_set("q"), "(1,inf)".parse::<Interval>().unwrap().into());
        assert!(f.atom_truth_set("r").is_empty());
    }

    #[test]
    fn json_round_trip() {
        let f = example();
        let text = f.to_json();
        assert!(text.contains("\"interval\": \"[0,1]\""));
        assert_eq!(Signal::from_json(&text).unwrap(), f);
        assert!(Signal::from_json(r#"[{"interval":"[0,1]","props":[]}]"#).is_err());
    }

    #[test]
    fn random_signals_are_deterministic() {
        let h = int(4);
        assert_eq!(random_signal(9, 6, &h, &["p", "q"]), random_signal(9, 6, &h, &["p", "q"]));
        assert_eq!(random_signal(1, 1, &h, &["p", "q"]).segments().len(), 1);
        for seed in 0..300 {
            let f = random_signal(seed, 6, &h, &["p", "q"]);
            assert!(f.segments().len() <= 6);
            assert!(f.breakpoints().iter().all(|b| *b <= h));
        }
    }
}
