//! Acceptance run: one pass/fail line per criterion, nonzero exit on any
//! failure. Corpus sizes can be scaled with `MITL_ACCEPTANCE_SCALE`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mitl::eval::{agreement_check, critical_grid, next_truth_set, sat, truth_set, Oracle, Semantics};
use mitl::formula::random::{random_bounded_positive_interval, random_formula};
use mitl::formula::{nnf, parse, subformula_dag_size, to_old, Formula};
use mitl::refuter::{
    build_f1, build_f2, choose_delta, encode_old_release, refute, CanonicalFormula, Clause, LinearConstraint, Polyhedron, Rel,
    RefutationReport, SignalAtom,
};
use mitl::signal::{random_signal_with, Signal};
use mitl::time::{int, midpoint, rat, Interval, IntervalSet, Rational, TimeBound};
use mitl::witness::{clock_bound, release_partition, until_partition, PartitionReport, Witness};

const CORPUS_SEED: u64 = 0x5eed_0000;
const WITNESS_SEED: u64 = 0x5eed_1000_0000;
const SIGNAL_SEED: u64 = 0x5eed_2000_0000;

type Verdict = Result<String, String>;

fn scale() -> f64 {
    std::env::var("MITL_ACCEPTANCE_SCALE").ok().and_then(|s| s.parse().ok()).unwrap_or(1.0)
}

fn sized(n: usize) -> usize {
    ((n as f64 * scale()).round() as usize).max(1)
}

fn iv(s: &str) -> Interval {
    s.parse().expect("fixed interval")
}

fn f(s: &str) -> Formula {
    parse(s).expect("fixed formula")
}

fn pair(k: usize) -> (Signal, Formula) {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + k as u64);
    (random_signal_with(&mut rng, 6, &int(4), &["p", "q"]), random_formula(&mut rng, 4, &["p", "q"]))
}

/// Formulas whose truth sets the run computed, for the oracle comparison.
#[derive(Default)]
struct Computed {
    items: Vec<(Signal, Formula, Semantics)>,
}

impl Computed {
    fn push(&mut self, f: &Signal, phi: &Formula, sem: Semantics) {
        self.items.push((f.clone(), phi.clone(), sem));
    }
}

fn example_two(seen: &mut Computed) -> Verdict {
    let start = Instant::now();
    let ex2 = Signal::from_text(&[("[0,1]", &["p"]), ("(1,inf)", &["q"])]).map_err(|e| e.to_string())?;
    let until = f("p U(0,2) q");
    let release = f("!p R(0,2) !q");
    let got = (sat(&ex2, &until, Semantics::Old), sat(&ex2, &release, Semantics::Old), sat(&ex2, &release, Semantics::New));
    seen.push(&ex2, &until, Semantics::Old);
    seen.push(&ex2, &release, Semantics::Old);
    seen.push(&ex2, &release, Semantics::New);
    let elapsed = start.elapsed();
    if got != (false, false, true) {
        return Err(format!("(until old, release old, release new) = {got:?}, expected (false, false, true)"));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("p U q old=false, !p R !q old=false, new=true in {elapsed:?}"))
}

fn duality(n: usize, seen: &mut Computed) -> Verdict {
    let (mut failures, mut old_broken) = (Vec::new(), 0);
    for k in 0..n {
        let (sig, phi) = pair(k);
        let normal = nnf(&phi);
        if truth_set(&sig, &phi, Semantics::New) != truth_set(&sig, &normal, Semantics::New) {
            failures.push(k);
        }
        if truth_set(&sig, &phi, Semantics::Old) != truth_set(&sig, &normal, Semantics::Old) {
            old_broken += 1;
        }
        seen.push(&sig, &normal, Semantics::New);
        seen.push(&sig, &normal, Semantics::Old);
    }
    if failures.is_empty() {
        Ok(format!("{n} pairs, 0 failures; old semantics differs from its nnf on {old_broken}"))
    } else {
        Err(format!("{} failures, first seeds {:?}", failures.len(), &failures[..failures.len().min(5)]))
    }
}

fn bridge(n: usize, seen: &mut Computed) -> Verdict {
    let mut failures = Vec::new();
    for k in 0..n {
        let (sig, phi) = pair(k);
        let translated = to_old(&phi);
        if truth_set(&sig, &phi, Semantics::New) != truth_set(&sig, &translated, Semantics::Old) {
            failures.push(k);
        }
        seen.push(&sig, &translated, Semantics::Old);
    }
    if failures.is_empty() {
        Ok(format!("{n} pairs, 0 failures"))
    } else {
        Err(format!("{} failures, first seeds {:?}", failures.len(), &failures[..failures.len().min(5)]))
    }
}

fn blowup(n: usize) -> Verdict {
    let mut worst = (0usize, 1usize, String::new());
    let mut violations = 0;
    for k in 0..n {
        let (_, phi) = pair(k);
        let (before, after) = (subformula_dag_size(&phi), subformula_dag_size(&to_old(&phi)));
        if after > 6 * before {
            violations += 1;
        }
        if after * worst.1 > worst.0 * before {
            worst = (after, before, phi.to_string());
        }
    }
    let example = f("p R[1,2] q");
    let (before, after) = (subformula_dag_size(&example), subformula_dag_size(&to_old(&example)));
    if violations > 0 {
        return Err(format!("{violations} formulas exceed six times their size"));
    }
    if after < 2 * before && worst.0 < 2 * worst.1 {
        return Err(format!("no instance with ratio >= 2; fixed example gives {after} vs {before}"));
    }
    Ok(format!(
        "{n} formulas within 6x; p R[1,2] q: {after} vs {before}; corpus worst {}/{} for {}",
        worst.0, worst.1, worst.2
    ))
}

fn next_operator(n: usize, seen: &mut Computed) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0xabcd);
    let mut failures = Vec::new();
    for k in 0..n {
        let (sig, phi) = pair(k);
        let next = Formula::next(phi.clone());
        let ks: Vec<Rational> = (0..3).map(|_| rat(rng.gen_range(1..=16), 4)).collect();
        for sem in Semantics::BOTH {
            let expected = next_truth_set(&truth_set(&sig, &phi, sem));
            if truth_set(&sig, &next, sem) != expected {
                failures.push((k, sem, None));
            }
            seen.push(&sig, &next, sem);
            for bound in &ks {
                let replaced = Formula::release(phi.clone(), phi.clone(), Interval::open(int(0), bound.clone()));
                if truth_set(&sig, &replaced, sem) != expected {
                    failures.push((k, sem, Some(bound.clone())));
                }
            }
        }
        // One replacement per instance goes to the oracle to bound the run time.
        let replaced = Formula::release(phi.clone(), phi.clone(), Interval::open(int(0), ks[0].clone()));
        seen.push(&sig, &replaced, Semantics::New);
    }
    if failures.is_empty() {
        Ok(format!("{n} pairs x 2 semantics, 3 bounds each, 0 failures"))
    } else {
        Err(format!("{} failures, first {:?}", failures.len(), &failures[..failures.len().min(3)]))
    }
}

fn samples(set: &IntervalSet, grid: &[Rational]) -> Vec<Rational> {
    let points = set.breakpoints();
    let mut out: Vec<Rational> = points.clone();
    for w in points.windows(2) {
        out.push(midpoint(&w[0], &w[1]));
    }
    if let Some(last) = points.last() {
        out.push(last + int(1));
    }
    out.extend(grid.iter().cloned());
    out.retain(|t| set.contains(t));
    out
}

fn check_partition(sig: &Signal, phi: &Formula, report: &PartitionReport, max_parts: usize) -> Result<usize, String> {
    if report.parts.len() > max_parts {
        return Err(format!("{} parts", report.parts.len()));
    }
    let union: IntervalSet = report.parts.iter().map(|p| p.interval.clone()).collect();
    if union != report.window_set {
        return Err(format!("parts cover {union}, window is {}", report.window_set));
    }
    for w in report.parts.windows(2) {
        if !(w[0].interval.sup() <= w[1].interval.inf() && w[0].interval.intersect(&w[1].interval).is_empty()) {
            return Err(format!("{} and {} are not strictly ordered", w[0].interval, w[1].interval));
        }
    }
    let grid = critical_grid(sig, phi, Semantics::New);
    let mut oracle = Oracle::new(sig, Semantics::New);
    let mut probes = 0;
    for part in &report.parts {
        if !part.proof_set.contains_interval(&part.interval) {
            return Err(format!("proof set {} misses {}", part.proof_set, part.interval));
        }
        for t in samples(&part.proof_set, &grid) {
            probes += 1;
            if !oracle.sat_at(phi, &t) {
                return Err(format!("proof set {} unsound at {t}", part.proof_set));
            }
        }
    }
    Ok(probes)
}

fn witnesses(n: usize, seen: &mut Computed) -> Verdict {
    let (mut probes, mut parts, mut failures) = (0, 0, Vec::new());
    let mut kinds = std::collections::BTreeSet::new();
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED + k as u64);
        let sig = random_signal_with(&mut rng, 6, &int(4), &["p", "q"]);
        let (a, b) = (random_formula(&mut rng, 2, &["p", "q"]), random_formula(&mut rng, 2, &["p", "q"]));
        let i = random_bounded_positive_interval(&mut rng);
        let until = Formula::until(a.clone(), b.clone(), i.clone());
        let release = Formula::release(a.clone(), b.clone(), i.clone());
        let results = [
            until_partition(&sig, &a, &b, &i).map_err(|e| e.to_string()).and_then(|r| check_partition(&sig, &until, &r, 2).map(|n| (n, r))),
            release_partition(&sig, &a, &b, &i)
                .map_err(|e| e.to_string())
                .and_then(|r| check_partition(&sig, &release, &r, 4).map(|n| (n, r))),
        ];
        for result in results {
            match result {
                Ok((n, report)) => {
                    probes += n;
                    parts += report.parts.len();
                    for p in &report.parts {
                        let kind = match &p.witness {
                            Witness::Until(w) => ('U', p.role, w.kind),
                            Witness::Release(w) => ('R', p.role, w.kind),
                        };
                        kinds.insert(kind);
                    }
                }
                Err(e) => failures.push(format!("seed {k}: {e}")),
            }
        }
        seen.push(&sig, &until, Semantics::New);
        seen.push(&sig, &release, Semantics::New);
    }
    if failures.is_empty() {
        Ok(format!("{n} instances, {parts} parts, {} role/kind combinations, {probes} oracle probes, 0 failures", kinds.len()))
    } else {
        Err(format!("{} failures, first {}", failures.len(), failures[0]))
    }
}

fn agreement(seen: &Computed) -> Verdict {
    let mut points = 0;
    for (sig, phi, sem) in &seen.items {
        match agreement_check(sig, phi, *sem) {
            Ok(n) => points += n,
            Err(d) => return Err(format!("{} under {} at {}: engine {} oracle {}", d.formula, d.semantics, d.time, d.engine, d.oracle)),
        }
    }
    Ok(format!("{} truth sets with all subformulas, {points} grid points, 0 disagreements", seen.items.len()))
}

fn clocks() -> Verdict {
    let mut facts = Vec::new();
    for i in ["[1,2]", "[1/100,1/50]"] {
        let c = clock_bound(&iv(i)).map_err(|e| e.to_string())?;
        if c.conservative_bound != 8 {
            return Err(format!("{i}: conservative bound {}", c.conservative_bound));
        }
        facts.push(format!("{i} -> 8"));
    }
    for n in [1, 5, 1000] {
        let c = clock_bound(&Interval::closed(int(n), int(2 * n))).map_err(|e| e.to_string())?;
        if c.obligations != 2 {
            return Err(format!("[{n},{}]: {} obligations", 2 * n, c.obligations));
        }
    }
    facts.push("[n,2n] -> 2 obligations for n in 1,5,1000".into());
    Ok(facts.join("; "))
}

/// `(props, interval)` per segment, for shape comparison.
fn shape(sig: &Signal) -> Vec<(Vec<String>, String)> {
    sig.segments().iter().map(|s| (s.props.iter().cloned().collect(), s.interval.to_string())).collect()
}

/// `(r, r+ε)` lies inside or outside every witnessed slice on `f1`, stays
/// below every witness line above `r`, and `r+ε` stays in the interval.
fn epsilon_ok(phi: &CanonicalFormula, report: &RefutationReport) -> Result<(), String> {
    let (r, eps) = (&report.r, &report.epsilon);
    let gap = Interval::open(r.clone(), r + eps);
    if !report.interval.contains(&(r + eps)) {
        return Err(format!("r+epsilon = {} leaves {}", r + eps, report.interval));
    }
    for (block, w) in phi.blocks.iter().zip(&report.witnesses_f1) {
        let Some(w) = w else { continue };
        if w.c > *r && w.c <= r + eps {
            return Err(format!("witness line {} inside (r, r+epsilon]", w.c));
        }
        for clause in &block[w.disjunct] {
            let j = clause.domain.slice_at_t1(&w.c);
            if !(j.contains_interval(&gap) || j.intersect(&gap).is_empty()) {
                return Err(format!("slice {j} splits {gap}"));
            }
        }
    }
    Ok(())
}

fn triangle() -> CanonicalFormula {
    let k = |a1, a2, rel, b| LinearConstraint::new(int(a1), int(a2), rel, int(b));
    let domain = Polyhedron::new(vec![k(1, 0, Rel::Ge, 0), k(0, 1, Rel::Ge, 0), k(1, 1, Rel::Le, 2)]);
    let atom = SignalAtom::new(2, f("q")).expect("literal atom");
    CanonicalFormula { blocks: vec![vec![vec![Clause::new(domain, vec![atom]).expect("one atom")]]] }
}

fn refuter() -> Verdict {
    let start = Instant::now();
    let i = iv("(0,2)");
    let phi = encode_old_release(&i).map_err(|e| e.to_string())?;
    let report: RefutationReport = refute(&phi, &i).map_err(|e| e.to_string())?;
    let (r, delta, eps) = (&report.r, &report.delta, &report.epsilon);
    if shape(&report.f1) != shape(&build_f1(r, delta).map_err(|e| e.to_string())?)
        || shape(&report.f2) != shape(&build_f2(r, delta, eps).map_err(|e| e.to_string())?)
    {
        return Err("constructed signals differ from the builders".into());
    }
    let p = || vec!["p".to_string()];
    let q = || vec!["q".to_string()];
    let expected_f1 = vec![
        (p(), Interval::closed(int(0), r.clone()).to_string()),
        (q(), Interval::open_closed(r.clone(), r + delta).to_string()),
        (p(), Interval::greater_than(r + delta).to_string()),
    ];
    let expected_f2 = vec![
        (p(), Interval::closed_open(int(0), r + eps).to_string()),
        (q(), Interval::closed(r + eps, r + delta).to_string()),
        (p(), Interval::greater_than(r + delta).to_string()),
    ];
    if shape(&report.f1) != expected_f1 || shape(&report.f2) != expected_f2 {
        return Err(format!("unexpected shapes {:?} / {:?}", shape(&report.f1), shape(&report.f2)));
    }
    if !(report.target_on_f1 && !report.target_on_f2) {
        return Err("target values are not (true, false)".into());
    }
    let mismatched = match report.mismatch_signal {
        1 => report.phi_on_f1 != report.target_on_f1,
        2 => report.phi_on_f2 != report.target_on_f2,
        _ => false,
    };
    if !mismatched {
        return Err(format!("mismatch signal {} does not disagree", report.mismatch_signal));
    }
    if choose_delta(&phi, r, &i) != *delta {
        return Err("delta is not reproducible".into());
    }
    let mut checked = 0;
    for poly in phi.polyhedra() {
        let closure = poly.closure();
        let admissible = closure.slice_at_t2(r);
        if admissible.is_empty() {
            continue;
        }
        let (lo, hi) = match (admissible.lo().finite(), admissible.hi().finite()) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            (Some(a), None) => (a.clone(), a + int(50)),
            (None, Some(b)) => (b - int(50), b.clone()),
            (None, None) => (int(-25), int(25)),
        };
        for k in 0..1000 {
            let c = &lo + (&hi - &lo) * rat(k, 999);
            let slice = closure.slice_at_t1(&c);
            if let (false, TimeBound::Finite(w)) = (slice.is_empty(), slice.width()) {
                if w > int(0) && w <= *delta {
                    return Err(format!("slice width {w} at c={c} is within (0, {delta}]"));
                }
            }
            checked += 1;
        }
    }
    epsilon_ok(&phi, &report)?;
    let tri = triangle();
    let tri_report = refute(&tri, &i).map_err(|e| format!("triangle: {e}"))?;
    if (tri_report.r.clone(), tri_report.delta.clone()) != (int(1), rat(1, 2)) {
        return Err(format!("triangle: r={} delta={}", tri_report.r, tri_report.delta));
    }
    epsilon_ok(&tri, &tri_report).map_err(|e| format!("triangle: {e}"))?;
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "r={r} delta={delta} epsilon={eps}, mismatch on f{}, {checked} delta samples; triangle epsilon={} mismatch on f{}; {elapsed:?}",
        report.mismatch_signal, tri_report.epsilon, tri_report.mismatch_signal
    ))
}

fn unsatisfiable_next_release(n: usize) -> Verdict {
    let phi = f("N q & (!p R(0,1) !q) & (p R(0,1) !q)");
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(SIGNAL_SEED + k as u64);
        let sig = random_signal_with(&mut rng, 6, &int(4), &["p", "q"]);
        for sem in Semantics::BOTH {
            let set = truth_set(&sig, &phi, sem);
            if !set.is_empty() {
                return Err(format!("signal seed {k} under {sem}: {set}"));
            }
        }
    }
    Ok(format!("{n} signals x 2 semantics, all empty"))
}

fn main() -> ExitCode {
    let corpus = sized(10_000);
    let mut seen = Computed::default();
    let mut criteria: Vec<(&str, Box<dyn FnMut(&mut Computed) -> Verdict>)> = vec![
        ("two-variable example", Box::new(example_two)),
        ("duality under the new semantics", Box::new(move |s| duality(corpus, s))),
        ("bridge to the old semantics", Box::new(move |s| bridge(corpus, s))),
        ("translation size", Box::new(move |_| blowup(corpus))),
        ("next operator", Box::new(move |s| next_operator(corpus, s))),
        ("step partitions and witnesses", Box::new(|s| witnesses(sized(1_000), s))),
        ("engine and oracle agree", Box::new(|s| agreement(s))),
        ("clock figures", Box::new(|_| clocks())),
        ("refuter end to end", Box::new(|_| refuter())),
        ("unsatisfiable next/release conjunction", Box::new(move |_| unsatisfiable_next_release(corpus))),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter_mut().enumerate() {
        let start = Instant::now();
        let verdict = check(&mut seen);
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
