use super::Formula;
use crate::time::TimeBound;

/// Pushes negations down to atoms, dualizing connectives and `U`/`R`.
pub fn nnf(f: &Formula) -> Formula {
    match f {
        Formula::Not(inner) => negated(inner),
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Or(a, b) => Formula::or(nnf(a), nnf(b)),
        Formula::And(a, b) => Formula::and(nnf(a), nnf(b)),
        Formula::Until(a, b, i) => Formula::until(nnf(a), nnf(b), i.clone()),
        Formula::Release(a, b, i) => Formula::release(nnf(a), nnf(b), i.clone()),
    }
}

/// `nnf(!f)`
fn negated(f: &Formula) -> Formula {
    match f {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Atom(_) => Formula::not(f.clone()),
        Formula::Not(inner) => nnf(inner),
        Formula::Or(a, b) => Formula::and(negated(a), negated(b)),
        Formula::And(a, b) => Formula::or(negated(a), negated(b)),
        Formula::Until(a, b, i) => Formula::release(negated(a), negated(b), i.clone()),
        Formula::Release(a, b, i) => Formula::until(negated(a), negated(b), i.clone()),
    }
}

/// Rewrites a formula so that the two-disjunct Release reading agrees with
/// the three-disjunct one. Every connective except Release is mapped
/// homomorphically.
pub fn to_old(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(to_old(a)),
        Formula::Or(a, b) => Formula::or(to_old(a), to_old(b)),
        Formula::And(a, b) => Formula::and(to_old(a), to_old(b)),
        Formula::Until(a, b, i) => Formula::until(to_old(a), to_old(b), i.clone()),
        Formula::Release(a, b, i) => {
            let a = to_old(a);
            let b = to_old(b);
            let next_a = Formula::next(a.clone());
            let base = Formula::or(
                Formula::release(a, b.clone(), i.clone()),
                Formula::release(next_a.clone(), b.clone(), i.clone()),
            );
            if i.inf() > TimeBound::zero() {
                base
            } else if i.is_left_open() {
                Formula::or(base, next_a)
            } else {
                Formula::or(base, Formula::and(b, next_a))
            }
        }
    }
}
