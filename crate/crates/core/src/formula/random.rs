//! Seeded random formulas and decoration intervals for property suites.

use rand::Rng;

use super::Formula;
use crate::time::{rat, Interval, TimeBound};

/// Endpoint lattice shared with random signals so that coincidences between
/// interval ends and signal breakpoints are common.
const ENDPOINTS: [(i64, i64); 7] = [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (5, 2), (3, 1)];

/// Any decoration interval: possibly empty, singleton, or unbounded.
pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    if rng.gen_bool(0.15) {
        return Interval::positive();
    }
    let (n, d) = ENDPOINTS[rng.gen_range(0..ENDPOINTS.len())];
    let lo = rat(n, d);
    let hi = match rng.gen_range(0..6) {
        0 => TimeBound::PosInf,
        1 => TimeBound::Finite(lo.clone()),
        2 => TimeBound::Finite(&lo + rat(1, 2)),
        3 => TimeBound::Finite(&lo + rat(1, 1)),
        _ => TimeBound::Finite(&lo + rat(2, 1)),
    };
    Interval::new(lo.into(), rng.gen_bool(0.5), hi, rng.gen_bool(0.5))
}

/// Non-empty, bounded, with a positive infimum and positive width.
pub fn random_bounded_positive_interval<R: Rng>(rng: &mut R) -> Interval {
    let (n, d) = ENDPOINTS[rng.gen_range(1..ENDPOINTS.len())];
    let lo = rat(n, d);
    let width = [rat(1, 2), rat(1, 1), rat(3, 2), rat(2, 1)][rng.gen_range(0..4)].clone();
    let hi = &lo + width;
    Interval::new(lo.into(), rng.gen_bool(0.5), hi.into(), rng.gen_bool(0.5))
}

/// A random formula over `atoms` with operator depth at most `max_depth`.
pub fn random_formula<R: Rng>(rng: &mut R, max_depth: usize, atoms: &[&str]) -> Formula {
    if max_depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..12) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::atom(atoms[rng.gen_range(0..atoms.len())]),
        };
    }
    let sub = |rng: &mut R| random_formula(rng, max_depth - 1, atoms);
    match rng.gen_range(0..10) {
        0 | 1 => Formula::not(sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::and(sub(rng), sub(rng)),
        4 | 5 => {
            let (a, b) = (sub(rng), sub(rng));
            Formula::until(a, b, random_interval(rng))
        }
        6 | 7 => {
            let (a, b) = (sub(rng), sub(rng));
            Formula::release(a, b, random_interval(rng))
        }
        8 => Formula::next(sub(rng)),
        _ => {
            let body = sub(rng);
            if rng.gen_bool(0.5) {
                Formula::eventually(random_interval(rng), body)
            } else {
                Formula::always(random_interval(rng), body)
            }
        }
    }
}
