use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use mitl::eval::{agreement_check, bridge_check, duality_check, truth_set, Semantics};
use mitl::formula::random::{random_bounded_positive_interval, random_formula};
use mitl::formula::{classify, nnf, normal_form_type, parse, to_old, Formula};
use mitl::refuter::{refute, CanonicalFormula};
use mitl::signal::{random_signal_with, Signal};
use mitl::time::{int, Interval};
use mitl::witness::{clock_bound, release_partition, until_partition};

#[derive(Debug, Parser)]
#[command(name = "mitl", version, about = "Exact evaluation and analysis of metric interval temporal logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Old,
    New,
    Both,
}

impl SemanticsArg {
    fn list(self) -> Vec<Semantics> {
        match self {
            SemanticsArg::Old => vec![Semantics::Old],
            SemanticsArg::New => vec![Semantics::New],
            SemanticsArg::Both => Semantics::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Whether the formula holds at time 0.
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_enum, default_value = "new")]
        semantics: SemanticsArg,
    },
    /// The set of times where the formula holds.
    Truthset {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_enum, default_value = "new")]
        semantics: SemanticsArg,
    },
    /// Compares a formula with its negation normal form.
    Duality {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        semantics: SemanticsArg,
    },
    /// Compares the new semantics of a formula with the old semantics of its translation.
    Bridge {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        signal: PathBuf,
    },
    /// Fragment membership, size and normal form tags.
    Classify {
        #[arg(long)]
        formula: String,
    },
    /// Negation normal form.
    Nnf {
        #[arg(long)]
        formula: String,
    },
    /// Translation into a formula with the same meaning under the old semantics.
    Toold {
        #[arg(long)]
        formula: String,
    },
    /// Partition of the first step of a top-level Until or Release into witnessed intervals.
    Witness {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        signal: PathBuf,
    },
    /// Signals on which a two-variable candidate semantics disagrees with the target.
    Refute {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        interval: String,
    },
    /// Property checks on generated instances.
    Randcheck {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        max_segments: u64,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("formula {0}")]
    Formula(#[from] mitl::formula::ParseError),
    #[error("signal {path}: {message}")]
    Signal { path: PathBuf, message: String },
    #[error("candidate {path}: {source}")]
    Candidate { path: PathBuf, source: serde_json::Error },
    #[error("interval: {0}")]
    Interval(#[from] mitl::time::ParseIntervalError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Witness(#[from] mitl::witness::WitnessError),
    #[error(transparent)]
    Refuter(#[from] mitl::refuter::RefuterError),
}

struct Outcome {
    report: Value,
    violation: bool,
}

impl Outcome {
    fn ok<T: Serialize>(report: T) -> Outcome {
        Outcome { report: to_value(report), violation: false }
    }
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_signal(path: &Path) -> Result<Signal, CliError> {
    Signal::from_json(&read(path)?).map_err(|e| CliError::Signal { path: path.to_path_buf(), message: e.to_string() })
}

fn fragment_names(f: &Formula) -> Vec<&'static str> {
    let r = classify(f);
    [(r.is_mtl, "MTL"), (r.is_mitl, "MITL"), (r.is_mitl0inf, "MITL0inf"), (r.is_mitlwi, "MITLwi")]
        .into_iter()
        .filter_map(|(yes, name)| yes.then_some(name))
        .collect()
}

fn witness(formula: &Formula, f: &Signal) -> Result<Outcome, CliError> {
    let report = match formula {
        Formula::Until(a, b, i) => until_partition(f, a, b, i)?,
        Formula::Release(a, b, i) => release_partition(f, a, b, i)?,
        other => return Err(CliError::Usage(format!("witness needs a top-level Until or Release, got {other}"))),
    };
    let clocks = match formula {
        Formula::Until(_, _, i) | Formula::Release(_, _, i) => clock_bound(i).ok(),
        _ => None,
    };
    Ok(Outcome::ok(json!({ "partition": report, "clocks": clocks })))
}

#[derive(Debug, Serialize)]
struct Failure {
    seed: u64,
    check: String,
    detail: String,
}

fn randcheck(seed: u64, count: u64, max_depth: usize, max_segments: usize) -> Outcome {
    let atoms = ["p", "q"];
    let mut failures = Vec::new();
    let mut old_duality_findings = Vec::new();
    for k in 0..count {
        let instance = seed.wrapping_add(k);
        let mut rng = ChaCha8Rng::seed_from_u64(instance);
        let f = random_signal_with(&mut rng, max_segments, &int(4), &atoms);
        let phi = random_formula(&mut rng, max_depth, &atoms);
        let mut fail = |check: &str, detail: String| failures.push(Failure { seed: instance, check: check.into(), detail });
        let [old, new] = duality_check(&f, &phi);
        if !old.equal {
            old_duality_findings.push(json!({ "seed": instance, "formula": phi.to_string(), "mismatch": old.mismatch }));
        }
        if !new.equal {
            fail("duality", format!("{phi}: mismatch {}", new.mismatch));
        }
        let bridge = bridge_check(&f, &phi);
        if !bridge.equal {
            fail("bridge", format!("{phi}: mismatch {}", bridge.mismatch));
        }
        for sem in Semantics::BOTH {
            if let Err(d) = agreement_check(&f, &phi, sem) {
                fail("oracle", serde_json::to_string(&d).expect("reports serialize"));
            }
        }
        let (a, b) = (random_formula(&mut rng, 1, &atoms), random_formula(&mut rng, 1, &atoms));
        let i = random_bounded_positive_interval(&mut rng);
        if let Err(e) = until_partition(&f, &a, &b, &i) {
            fail("until_partition", format!("{a} U{i} {b}: {e}"));
        }
        if let Err(e) = release_partition(&f, &a, &b, &i) {
            fail("release_partition", format!("{a} R{i} {b}: {e}"));
        }
    }
    let violation = !failures.is_empty();
    let report = json!({
        "seed": seed,
        "count": count,
        "failures": failures,
        "old_duality_findings": old_duality_findings.len(),
        "old_duality_examples": old_duality_findings.into_iter().take(5).collect::<Vec<_>>(),
    });
    Outcome { report, violation }
}

fn run(command: Command) -> Result<Outcome, CliError> {
    Ok(match command {
        Command::Eval { formula, signal, semantics } => {
            let (phi, f) = (parse(&formula)?, load_signal(&signal)?);
            let results: Vec<Value> = semantics
                .list()
                .into_iter()
                .map(|sem| json!({ "semantics": sem, "holds": truth_set(&f, &phi, sem).contains(&int(0)) }))
                .collect();
            Outcome::ok(json!({ "formula": phi.to_string(), "results": results }))
        }
        Command::Truthset { formula, signal, semantics } => {
            let (phi, f) = (parse(&formula)?, load_signal(&signal)?);
            let results: Vec<Value> =
                semantics.list().into_iter().map(|sem| json!({ "semantics": sem, "set": truth_set(&f, &phi, sem) })).collect();
            Outcome::ok(json!({ "formula": phi.to_string(), "results": results }))
        }
        Command::Duality { formula, signal, semantics } => {
            let (phi, f) = (parse(&formula)?, load_signal(&signal)?);
            let wanted = semantics.list();
            let reports: Vec<_> = duality_check(&f, &phi).into_iter().filter(|r| wanted.contains(&r.semantics)).collect();
            let violation = reports.iter().any(|r| r.semantics == Semantics::New && !r.equal);
            Outcome { report: json!({ "nnf": nnf(&phi).to_string(), "reports": reports }), violation }
        }
        Command::Bridge { formula, signal } => {
            let report = bridge_check(&load_signal(&signal)?, &parse(&formula)?);
            let violation = !report.equal;
            Outcome { report: to_value(report), violation }
        }
        Command::Classify { formula } => {
            let phi = parse(&formula)?;
            Outcome::ok(json!({
                "formula": phi.to_string(),
                "fragments": fragment_names(&phi),
                "report": classify(&phi),
                "normal_form": normal_form_type(&phi),
            }))
        }
        Command::Nnf { formula } => {
            let phi = parse(&formula)?;
            Outcome::ok(json!({ "formula": phi.to_string(), "nnf": nnf(&phi).to_string() }))
        }
        Command::Toold { formula } => {
            let phi = parse(&formula)?;
            Outcome::ok(json!({ "formula": phi.to_string(), "old": to_old(&phi).to_string() }))
        }
        Command::Witness { formula, signal } => witness(&parse(&formula)?, &load_signal(&signal)?)?,
        Command::Refute { phi, interval } => {
            let candidate =
                CanonicalFormula::from_json(&read(&phi)?).map_err(|source| CliError::Candidate { path: phi.clone(), source })?;
            let i: Interval = interval.parse()?;
            Outcome::ok(refute(&candidate, &i)?)
        }
        Command::Randcheck { seed, count, max_depth, max_segments } => {
            randcheck(seed, count, max_depth, max_segments as usize)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
            // A closed pipe on the reader's side is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if outcome.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
