use mitl::eval::{sat, Semantics};
use mitl::formula::random::random_interval;
use mitl::formula::{parse, Formula};
use mitl::refuter::random::random_canonical;
use mitl::refuter::{choose_delta, choose_r, encode_old_release, eval_canonical, refute, CanonicalFormula, Clause};
use mitl::signal::{random_signal_with, Signal};
use mitl::time::{int, rat, Interval, Rational, TimeBound};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn proposer(i: &Interval) -> Formula {
    Formula::release(parse("!p").unwrap(), parse("!q").unwrap(), i.clone())
}

fn wide_interval<R: Rng>(rng: &mut R) -> Interval {
    loop {
        let i = random_interval(rng);
        if !i.is_empty() && !i.is_singleton() {
            return i;
        }
    }
}

fn prop(psi: &Formula, props: &std::collections::BTreeSet<String>) -> bool {
    match psi {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(p) => props.contains(p),
        Formula::Not(a) => !prop(a, props),
        Formula::Or(a, b) => prop(a, props) || prop(b, props),
        Formula::And(a, b) => prop(a, props) && prop(b, props),
        other => panic!("temporal signal atom {other}"),
    }
}

fn holds_at(f: &Signal, psi: &Formula, t: &Rational) -> bool {
    if *t < int(0) {
        prop(psi, &Default::default())
    } else {
        prop(psi, f.value_at(t).unwrap())
    }
}

/// Pointwise truth of a clause, independent of the line decision procedure.
fn clause_at(f: &Signal, clause: &Clause, c: &Rational, t2: &Rational) -> bool {
    !clause.domain.contains(c, t2)
        || clause.signal.iter().any(|a| holds_at(f, &a.psi, if a.var == 1 { c } else { t2 }))
}

fn lattice(lo: i64, hi: i64, den: i64) -> Vec<Rational> {
    (lo * den..=hi * den).map(|n| rat(n, den)).collect()
}

/// Checks a decision of `phi` on `f`: a witness line must satisfy every clause
/// at every probed `t2`, and without one every probed line must fail somewhere.
fn confirm(phi: &CanonicalFormula, f: &Signal, claimed: bool, witnesses: &[Option<mitl::refuter::BlockWitness>]) -> bool {
    let mut probes = lattice(-2, 6, 8);
    probes.extend(f.breakpoints());
    if claimed {
        return phi.blocks.iter().zip(witnesses).all(|(block, w)| {
            let w = w.as_ref().unwrap();
            let mut points = probes.clone();
            for clause in &block[w.disjunct] {
                let j = clause.domain.slice_at_t1(&w.c);
                points.extend([j.lo().finite(), j.hi().finite()].into_iter().flatten().cloned());
            }
            block[w.disjunct].iter().all(|cl| points.iter().all(|t2| clause_at(f, cl, &w.c, t2)))
        });
    }
    let failing = phi.blocks.iter().position(|block| {
        probes.iter().all(|c| {
            block.iter().all(|clauses| {
                clauses.iter().any(|cl| {
                    let j = cl.domain.slice_at_t1(c);
                    let mut points = probes.clone();
                    points.extend([j.lo().finite(), j.hi().finite()].into_iter().flatten().cloned());
                    if let Some(m) = j.sample() {
                        points.push(m);
                    }
                    points.iter().any(|t2| !clause_at(f, cl, c, t2))
                })
            })
        })
    });
    failing.is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn encoding_matches_old_release(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_signal_with(&mut rng, 6, &int(4), &["p", "q"]);
        let i = random_interval(&mut rng);
        prop_assume!(!i.is_empty());
        let phi = encode_old_release(&i).unwrap();
        prop_assert_eq!(eval_canonical(&phi, &f).holds, sat(&f, &proposer(&i), Semantics::Old), "{} on {:?}", i, f);
    }

    #[test]
    fn delta_avoids_thin_slices(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_canonical(&mut rng);
        let i = wide_interval(&mut rng);
        let (r, guard) = choose_r(&phi, &i).unwrap();
        prop_assert!(i.contains(&r) && guard > int(0));
        let delta = choose_delta(&phi, &r, &i);
        prop_assert!(delta > int(0));
        if let TimeBound::Finite(s) = i.sup() {
            prop_assert!(s - &r > delta);
        }
        for p in phi.polyhedra() {
            let closure = p.closure();
            let admissible = closure.slice_at_t2(&r);
            if admissible.is_empty() {
                continue;
            }
            let (lo, hi) = match (admissible.lo().finite(), admissible.hi().finite()) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                (Some(a), None) => (a.clone(), a + int(40)),
                (None, Some(b)) => (b - int(40), b.clone()),
                (None, None) => (int(-20), int(20)),
            };
            for k in 0..=1000 {
                let c = &lo + (&hi - &lo) * rat(k, 1000);
                let slice = closure.slice_at_t1(&c);
                if slice.is_empty() {
                    continue;
                }
                if let TimeBound::Finite(w) = slice.width() {
                    prop_assert!(w == int(0) || w > delta, "slice width {} at c={} vs delta {}", w, c, delta);
                }
            }
        }
    }

    #[test]
    fn refutations_are_confirmed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_canonical(&mut rng);
        let i = wide_interval(&mut rng);
        let report = refute(&phi, &i);
        prop_assert!(report.is_ok(), "{} on {}: {:?}", phi.to_json(), i, report);
        let report = report.unwrap();
        prop_assert!(report.target_on_f1 && !report.target_on_f2);
        prop_assert!(report.epsilon > int(0) && report.epsilon < report.delta);
        prop_assert!(i.contains(&(&report.r + &report.epsilon)));
        let (f, claimed, witnesses) = if report.mismatch_signal == 1 {
            (&report.f1, report.phi_on_f1, &report.witnesses_f1)
        } else {
            (&report.f2, report.phi_on_f2, &report.witnesses_f2)
        };
        prop_assert!(confirm(&phi, f, claimed, witnesses), "unconfirmed decision on signal {}", report.mismatch_signal);
    }
}
