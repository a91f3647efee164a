mod gen;
mod io;
mod report;
mod run;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use netpred_core::error_model::pareto_frontier;
use netpred_core::instance::predictions_to_json;
use netpred_core::perturb::Perturbation;
use netpred_core::request::ProblemKind;
use netpred_core::suites::{registry, Options, CHECK_COUNT};
use serde_json::json;
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Parser, Debug)]
#[command(name = "netpred", version, about = "Online network design with predictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance and its request sequence.
    Gen {
        #[command(flatten)]
        args: gen::GenArgs,
        #[arg(long, default_value = "st")]
        problem: ProblemKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Perturb a request file into a prediction file.
    Perturb {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        requests: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        drop_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        add_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the engine and the framework over a batch of prediction sets.
    Run {
        #[arg(long)]
        problem: ProblemKind,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        requests: PathBuf,
        /// Prediction file; repeat for several episodes.
        #[arg(long = "predictions")]
        predictions: Vec<PathBuf>,
        /// Sweep drop rates (comma separated).
        #[arg(long, value_delimiter = ',')]
        drop_rates: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        add_rates: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        #[arg(long, value_enum, default_value_t = run::Algorithm::Both)]
        algorithm: run::Algorithm,
        /// Override the solver's approximation factor.
        #[arg(long)]
        gamma: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Error frontier of a request and a prediction file.
    Error {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        requests: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        /// CSV output; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run invariant checks: all, a module name, or a check name.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Instance counts of the acceptance criteria.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate CSV and plots for a run directory.
    Report {
        dir: PathBuf,
        /// Defaults to `<dir>/report`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Timestamps live only here.
fn sidecar(out: &Path, command: &str, started: Instant) -> Result<()> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "command": command,
        "finished_unix": secs,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    io::write(&out.join("meta.json"), serde_json::to_string_pretty(&meta)? + "\n")
}

fn verify(suite: &str, full: bool, seed: u64, out: Option<&Path>) -> Result<bool> {
    let reg = registry();
    let names: HashSet<&str> = reg.iter().map(|c| c.name).collect();
    if reg.len() != CHECK_COUNT || names.len() != CHECK_COUNT {
        bail!("check registry has {} entries ({} distinct), expected {CHECK_COUNT}", reg.len(), names.len());
    }
    let selected: Vec<_> = reg.iter().filter(|c| suite == "all" || c.module == suite || c.name == suite).collect();
    if selected.is_empty() {
        let mut modules: Vec<&str> = reg.iter().map(|c| c.module).collect();
        modules.dedup();
        bail!("no check or module named '{suite}' (modules: {})", modules.join(", "));
    }
    let opts = if full { Options::full(seed) } else { Options::quick(seed) };
    let mut table = String::new();
    let mut ok = true;
    for c in selected {
        let o = c.execute(&opts);
        ok &= o.passed;
        table.push_str(&format!("{:<22} {o}\n", c.module));
    }
    let failed = table.lines().filter(|l| l.contains(" FAIL ")).count();
    table.push_str(&format!("{} checks, {failed} failed\n", table.lines().count()));
    print!("{table}");
    if let Some(p) = out {
        io::write(p, &table)?;
    }
    Ok(ok)
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.command {
        Command::Gen { args, problem, seed, out } => {
            let g = gen::generate(&args, problem, seed)?;
            gen::write(&out, &g)?;
            sidecar(&out, "gen", started)?;
            eprintln!("{} vertices, {} requests -> {}", g.graph.vertex_count(), g.requests.len(), out.display());
        }
        Command::Perturb { instance, requests, drop_rate, add_rate, radius, seed, out } => {
            let (_, graph) = io::instance(&instance)?;
            let reqs = io::requests(&requests, &graph)?;
            let p = Perturbation { drop_rate, add_rate, displacement_radius: radius, seed };
            p.validate()?;
            let set = p.apply(&graph, &reqs)?;
            io::write(&out, predictions_to_json(&set))?;
        }
        Command::Run {
            problem,
            instance,
            requests,
            predictions,
            drop_rates,
            add_rates,
            radii,
            repetitions,
            algorithm,
            gamma,
            seed,
            out,
        } => {
            let any = !(drop_rates.is_empty() && add_rates.is_empty() && radii.is_empty());
            let or_zero = |v: Vec<f64>| if v.is_empty() { vec![0.0] } else { v };
            let sweep = any.then(|| run::Sweep {
                drop_rates: or_zero(drop_rates),
                add_rates: or_zero(add_rates),
                radii: or_zero(radii),
                repetitions,
            });
            let cfg = run::ExperimentConfig { problem, instance, requests, predictions, sweep, algorithm, gamma, seed, out };
            let n = run::execute(&cfg)?;
            sidecar(&cfg.out, "run", started)?;
            eprintln!("{n} episodes -> {}", cfg.out.display());
        }
        Command::Error { instance, requests, predictions, out } => {
            let (_, graph) = io::instance(&instance)?;
            let reqs = io::requests(&requests, &graph)?;
            let preds = io::predictions(&predictions, &graph)?;
            let csv = pareto_frontier(&reqs, &preds, &graph.metric())?.to_csv();
            match out {
                Some(p) => io::write(&p, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Verify { suite, full, seed, out } => return verify(&suite, full, seed, out.as_deref()),
        Command::Report { dir, out } => {
            let out = out.unwrap_or_else(|| dir.join("report"));
            let n = report::report(&dir, &out)?;
            eprintln!("{n} groups -> {}", out.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
