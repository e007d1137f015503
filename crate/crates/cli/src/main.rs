mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kolmocensor::censorship::{self, build_censored_space, default_max_order, MeasurementSuite, SetupDistribution};
use kolmocensor::ch::ch_evaluate;
use kolmocensor::index::IndexSet;
use kolmocensor::io;
use kolmocensor::orsay::{self, OrsayConfig};
use kolmocensor::polytope::{membership_with, representation_from_weights, representation_with_names, MembershipOptions};
use kolmocensor::rational::parse_rational;
use kolmocensor::simulation::{self, PRNG_ALGORITHM};
use kolmocensor::{Error, Rational, RationalizationPolicy};
use serde_json::{json, Value};

const EXIT_NEGATIVE: u8 = 2;
const EXIT_ASSUMPTION: u8 = 3;

#[derive(Parser)]
#[command(name = "kolmocensor", version, about = "Classical representability of correlation data and Kolmogorovian censorship")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Accepted distance when turning floats into fractions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_denominator: u64,
    /// Reject floats that are not exactly the fraction they round to.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest number of events accepted by `check`.
    #[arg(long, global = true, default_value_t = kolmocensor::polytope::DEFAULT_N_MAX)]
    n_max: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    /// Only for `simulate`.
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Tables,
    Vectors,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership in the correlation polytope (exit 2 if outside).
    Check { vector: PathBuf },
    /// Evaluate the Clauser–Horne system (exit 2 if violated).
    Ch { vector: PathBuf },
    /// Build the probability space of a convex combination of vertices.
    Represent {
        weights: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and verify the censored Kolmogorovian space of a suite.
    Censor {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest |I1| + |I2| checked; defaults to min(2n, 8).
        #[arg(long, conflicts_with = "full_order")]
        max_order: Option<usize>,
        /// Check every (I1, I2).
        #[arg(long)]
        full_order: bool,
    },
    /// The two-spin singlet example.
    Orsay {
        /// Directions of a, a', b, b' in degrees.
        #[arg(long, default_value = "0,120,120,240")]
        angles: String,
        /// Weights of the contexts ab, ab', a'b, a'b'.
        #[arg(long, default_value = "1/4,1/4,1/4,1/4")]
        weights: String,
        #[arg(long, value_enum, default_value_t = Emit::All)]
        emit: Emit,
    },
    /// Sample switch settings and detector outcomes.
    Simulate {
        #[arg(long, requires = "dist")]
        suite: Option<PathBuf>,
        #[arg(long, requires = "suite")]
        dist: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// JSON list of {"outcomes": [...], "switches": [...]} to estimate.
        #[arg(long)]
        queries: Option<PathBuf>,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn write_json(path: &Path, value: &Value) -> anyhow::Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn require_not_csv(g: &Global) -> anyhow::Result<()> {
    if g.format == Format::Csv {
        bail!("--format csv is only available for `simulate`");
    }
    Ok(())
}

fn parse_list<T>(text: &str, what: &str, f: impl Fn(&str) -> anyhow::Result<T>) -> anyhow::Result<[T; 4]> {
    let items = text.split(',').map(|s| f(s.trim())).collect::<anyhow::Result<Vec<T>>>()?;
    items
        .try_into()
        .map_err(|v: Vec<T>| anyhow::anyhow!("--{what} needs 4 comma-separated values, got {}", v.len()))
}

fn load_setup(suite: &Path, dist: &Path, policy: &RationalizationPolicy) -> anyhow::Result<(MeasurementSuite, SetupDistribution)> {
    let suite = io::parse_suite(&read(suite)?)?;
    let kappa = io::parse_distribution(&read(dist)?, &suite, policy)?;
    Ok((suite, kappa))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let g = &cli.global;
    let policy = RationalizationPolicy::new(g.tolerance, g.max_denominator, g.strict)?;
    match &cli.command {
        Command::Check { vector } => {
            require_not_csv(g)?;
            let p = io::parse_vector(&read(vector)?, &policy)?;
            let opts = MembershipOptions {
                n_max: g.n_max,
                ..Default::default()
            };
            let verdict = membership_with(&p, opts)?;
            match g.format {
                Format::Json => emit_json(&io::verdict_to_json(&p, &verdict)),
                _ => print!("{}", render::verdict(&p, &verdict)),
            }
            Ok(if verdict.is_inside() { 0 } else { EXIT_NEGATIVE })
        }
        Command::Ch { vector } => {
            require_not_csv(g)?;
            let p = io::parse_vector(&read(vector)?, &policy)?;
            let report = ch_evaluate(&p)?;
            match g.format {
                Format::Json => emit_json(&io::ch_report_to_json(&report)),
                _ => print!("{}", render::ch(&report)),
            }
            Ok(if report.holds { 0 } else { EXIT_NEGATIVE })
        }
        Command::Represent { weights, out } => {
            require_not_csv(g)?;
            let input = io::parse_weights(&read(weights)?, &policy)?;
            let scheme = kolmocensor::polytope::ConjunctionScheme::with_singletons(input.n, [])?;
            let space = match &input.names {
                Some(names) => representation_with_names(&input.weights, &scheme, names)?,
                None => representation_from_weights(&input.weights, &scheme)?,
            };
            let value = io::space_to_json(&space);
            if let Some(path) = out {
                write_json(path, &value)?;
            }
            match g.format {
                Format::Json => emit_json(&value),
                _ => print!("{}", render::space(&space)),
            }
            Ok(0)
        }
        Command::Censor {
            suite,
            dist,
            out,
            max_order,
            full_order,
        } => {
            require_not_csv(g)?;
            let (suite, kappa) = load_setup(suite, dist, &policy)?;
            let order = if *full_order {
                2 * suite.len()
            } else {
                max_order.unwrap_or_else(|| default_max_order(suite.len()))
            };
            let space = build_censored_space(&suite, &kappa, &policy)?;
            let report = censorship::verify_censorship(&space, &suite, &kappa, order, &policy)?;
            let space_json = io::space_to_json(space.space());
            if let Some(path) = out {
                write_json(path, &space_json)?;
            }
            match g.format {
                Format::Json => emit_json(&json!({
                    "space": space_json,
                    "verification": io::verification_to_json(&report, &suite),
                })),
                _ => {
                    print!("{}", render::space(space.space()));
                    println!(
                        "verified {} of {} (I1, I2) pairs up to order {}: {}",
                        report.exact,
                        report.checked,
                        report.max_order,
                        if report.passed() { "all exact" } else { "MISMATCH" }
                    );
                    for m in &report.mismatches {
                        println!(
                            "  outcomes {} switches {}: space {} vs effective {}",
                            suite.context_label(m.outcomes),
                            suite.context_label(m.switches),
                            m.space_value,
                            m.effective_value
                        );
                    }
                }
            }
            Ok(if report.passed() { 0 } else { EXIT_NEGATIVE })
        }
        Command::Orsay { angles, weights, emit } => {
            require_not_csv(g)?;
            let degrees = parse_list(angles, "angles", |s| s.parse::<f64>().with_context(|| format!("bad angle `{s}`")))?;
            let weights: [Rational; 4] = parse_list(weights, "weights", |s| Ok(parse_rational(s)?))?;
            let cfg = OrsayConfig::from_degrees(degrees, weights);
            orsay_command(&cfg, *emit, g.format, &policy)
        }
        Command::Simulate {
            suite,
            dist,
            trials,
            queries,
        } => {
            let (suite, kappa) = match (suite, dist) {
                (Some(s), Some(d)) => load_setup(s, d, &policy)?,
                _ => {
                    let cfg = OrsayConfig::default();
                    let suite = orsay::build_suite(&cfg);
                    let kappa = orsay::distribution(&cfg, &suite)?;
                    (suite, kappa)
                }
            };
            simulate_command(&suite, &kappa, *trials, queries.as_deref(), g, &policy)
        }
    }
}

fn orsay_command(cfg: &OrsayConfig, emit: Emit, format: Format, policy: &RationalizationPolicy) -> anyhow::Result<u8> {
    let suite = orsay::build_suite(cfg);
    let want_tables = emit != Emit::Vectors;
    let want_vectors = emit != Emit::Tables;
    let mut doc = serde_json::Map::new();
    if want_tables {
        let t = orsay::tables(cfg, policy)?;
        match format {
            Format::Json => {
                let contexts: Vec<Value> = t
                    .contexts
                    .iter()
                    .map(|c| json!({"context": c.title(), "cells": c.cells.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>()}))
                    .collect();
                doc.insert("contexts".into(), json!(contexts));
                doc.insert(
                    "censored".into(),
                    json!(t.censored.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>()),
                );
                doc.insert("space".into(), io::space_to_json(t.space.space()));
            }
            _ => {
                print!("{}", render::context_tables(&t));
                println!("{}", render::censored_table(&t));
            }
        }
    }
    if want_vectors {
        let naked = orsay::naked_vector(cfg, policy)?;
        let scheme = orsay::effective_scheme();
        let effective = orsay::effective_vector(cfg, &scheme, policy)?;
        let names = suite.event_names();
        let label = |s: IndexSet| s.iter().map(|i| names[i].as_str()).collect::<Vec<_>>().join(" ∧ ");
        let naked_label = |s: IndexSet| s.iter().map(|i| orsay::NAMES[i]).collect::<Vec<_>>().join(" ∧ ");
        match format {
            Format::Json => {
                doc.insert("naked".into(), io::vector_to_json(&naked));
                doc.insert(
                    "effective".into(),
                    json!(effective
                        .iter()
                        .map(|(s, v)| json!({"events": s.iter().map(|i| names[i].clone()).collect::<Vec<_>>(), "p": v.to_string()}))
                        .collect::<Vec<_>>()),
                );
            }
            _ => {
                println!("naked (quantum) probabilities");
                let rows: Vec<Vec<String>> = naked.iter().map(|(s, v)| vec![format!("p({})", naked_label(s)), v.to_string()]).collect();
                println!("{}", render::columns(&rows));
                println!("effective probabilities");
                let rows: Vec<Vec<String>> = effective.iter().map(|(s, v)| vec![format!("p({})", label(s)), v.to_string()]).collect();
                print!("{}", render::columns(&rows));
            }
        }
    }
    if format == Format::Json {
        emit_json(&Value::Object(doc));
    }
    Ok(0)
}

fn simulate_command(
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    trials: u64,
    queries: Option<&Path>,
    g: &Global,
    policy: &RationalizationPolicy,
) -> anyhow::Result<u8> {
    let queries = match queries {
        Some(path) => Some(io::parse_queries(&read(path)?, suite)?),
        None => None,
    };
    let records = simulation::run(suite, kappa, trials, g.seed, policy)?;
    let bits = |r: &simulation::TrialRecord| r.context.iter().map(|i| if r.ones.contains(i) { '1' } else { '0' }).collect::<String>();
    let comparisons = match &queries {
        Some(q) => Some(simulation::compare(&simulation::estimate(&records, q), suite, kappa, 5.0, policy)?),
        None => None,
    };
    let names = |s: IndexSet, switch: bool| -> Vec<String> {
        s.iter()
            .map(|i| {
                let m = &suite.measurements()[i];
                if switch { m.switch_name.clone() } else { m.name.clone() }
            })
            .collect()
    };
    if g.format == Format::Json {
        emit_json(&json!({
            "seed": g.seed,
            "prng": PRNG_ALGORITHM,
            "trials": trials,
            "records": records.iter().map(|r| json!({
                "trial": r.trial,
                "context": names(r.context, false),
                "bits": bits(r),
            })).collect::<Vec<_>>(),
            "estimates": comparisons.iter().flatten().map(|c| json!({
                "outcomes": names(c.estimate.outcomes, false),
                "switches": names(c.estimate.switches, true),
                "count": c.estimate.count,
                "frequency": c.estimate.frequency,
                "std_error": c.estimate.std_error,
                "exact": c.exact,
                "within_5se": c.within,
            })).collect::<Vec<_>>(),
        }));
    } else {
        println!("# seed={} prng={} trials={trials}", g.seed, PRNG_ALGORITHM);
        println!("trial,context,bits");
        for r in &records {
            println!("{},\"{}\",{}", r.trial, suite.context_label(r.context), bits(r));
        }
        for c in comparisons.iter().flatten() {
            println!(
                "# estimate outcomes={} switches={} frequency={:.6} exact={:.6} se={:.6} within_5se={}",
                names(c.estimate.outcomes, false).join("+"),
                names(c.estimate.switches, true).join("+"),
                c.estimate.frequency,
                c.exact,
                c.binomial_se,
                c.within
            );
        }
    }
    Ok(0)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::IncompatibleSupport { .. } | Error::IncompatibleContext { .. }) => EXIT_ASSUMPTION,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
