//! Batch runs: one episode per prediction set, in a worker pool.

use crate::io;
use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use netpred_core::error_model::{pareto_frontier, ParetoFrontier};
use netpred_core::framework::{run_engine_only, run_with_predictions, standard_engine, RunReport};
use netpred_core::oracles::exact_capacitated_fl;
use netpred_core::perturb::Perturbation;
use netpred_core::prize_collecting::{default_solver, PrizeCollectingSolver, WithGamma};
use netpred_core::reductions::{capacitated_run, priority_run};
use netpred_core::request::{PredictionSet, ProblemKind, Request};
use netpred_core::suites::instances::{opt_exact, vertices_of};
use netpred_core::{Exact, Scalar, WeightedGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Engine,
    Framework,
    Both,
}

/// Sweep of synthetic predictions: every combination of rates, each
/// repeated with its own seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub drop_rates: Vec<f64>,
    pub add_rates: Vec<f64>,
    pub radii: Vec<f64>,
    pub repetitions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub instance: PathBuf,
    pub requests: PathBuf,
    /// Prediction files, one episode each.
    pub predictions: Vec<PathBuf>,
    pub sweep: Option<Sweep>,
    pub algorithm: Algorithm,
    pub gamma: Option<u32>,
    pub seed: u64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        for p in [&self.instance, &self.requests].into_iter().chain(&self.predictions) {
            if !p.is_file() {
                bail!("{}: no such file", p.display());
            }
        }
        if self.gamma == Some(0) {
            bail!("--gamma must be at least 1");
        }
        if let Some(s) = &self.sweep {
            if s.repetitions == 0 {
                bail!("--repetitions must be at least 1");
            }
            for &d in &s.drop_rates {
                for &a in &s.add_rates {
                    for &r in &s.radii {
                        Perturbation { drop_rate: d, add_rate: a, displacement_radius: r, seed: 0 }.validate()?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Source {
    File(PathBuf),
    Perturbed(Perturbation, usize),
    Empty,
}

#[derive(Clone, Debug)]
struct Episode {
    id: usize,
    source: Source,
}

fn episodes(cfg: &ExperimentConfig) -> Vec<Episode> {
    let mut out = Vec::new();
    for p in &cfg.predictions {
        out.push(Source::File(p.clone()));
    }
    if let Some(s) = &cfg.sweep {
        for &d in &s.drop_rates {
            for &a in &s.add_rates {
                for &r in &s.radii {
                    for rep in 0..s.repetitions {
                        let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(out.len() as u64);
                        let p = Perturbation { drop_rate: d, add_rate: a, displacement_radius: r, seed };
                        out.push(Source::Perturbed(p, rep));
                    }
                }
            }
        }
    }
    if out.is_empty() {
        out.push(Source::Empty);
    }
    out.into_iter().enumerate().map(|(id, source)| Episode { id, source }).collect()
}

pub struct Loaded {
    pub graph: WeightedGraph<Exact>,
    pub root: Option<usize>,
    pub requests: Vec<Request>,
}

pub fn load(cfg: &ExperimentConfig) -> Result<Loaded> {
    let (file, graph) = io::instance(&cfg.instance)?;
    let requests = io::requests(&cfg.requests, &graph)?;
    let root = match cfg.problem {
        ProblemKind::SteinerTree => Some(file.root.unwrap_or(0)),
        _ => None,
    };
    Ok(Loaded { graph, root, requests })
}

fn solver(cfg: &ExperimentConfig) -> Box<dyn PrizeCollectingSolver<Exact>> {
    let base = default_solver::<Exact>(cfg.problem.demand_kind());
    match cfg.gamma {
        Some(gamma) => Box::new(WithGamma { inner: base, gamma }),
        None => base,
    }
}

/// Cost paid and, where the problem has one, the framework report.
pub struct Outcome {
    pub cost: Exact,
    pub reports: Vec<RunReport<Exact>>,
    pub extra: Value,
}

/// The framework on `predictions`; empty predictions give the engine alone.
pub fn framework(cfg: &ExperimentConfig, l: &Loaded, predictions: &PredictionSet) -> Result<Outcome> {
    let solver = solver(cfg);
    let kind = cfg.problem.demand_kind();
    Ok(match cfg.problem {
        ProblemKind::CapacitatedFacilityLocation => {
            let run = capacitated_run(&l.graph, &l.requests, predictions, solver.as_ref())?;
            let extra = json!({
                "transformed_cost": run.transformed.total_cost.to_string(),
                "copies": run.playback.copies,
            });
            Outcome { cost: run.playback.cost, reports: vec![run.transformed], extra }
        }
        ProblemKind::PrioritySteinerForest => {
            let b = l.graph.max_priority().max(1);
            let run = priority_run(&l.graph, &l.requests, predictions, b, solver.as_ref())?;
            let extra = json!({ "summed_cost": run.summed_cost.to_string(), "edges": run.edges });
            Outcome { cost: run.deduplicated_cost, reports: run.classes.into_iter().map(|c| c.report).collect(), extra }
        }
        _ => {
            let report = run_with_predictions(
                &l.graph,
                kind,
                l.root,
                &l.requests,
                predictions,
                solver.as_ref(),
                standard_engine(&l.graph, kind, l.root),
            )?;
            Outcome { cost: report.total_cost.clone(), reports: vec![report], extra: Value::Null }
        }
    })
}

/// The online engine with no predictions at all.
pub fn engine_only(cfg: &ExperimentConfig, l: &Loaded) -> Result<Exact> {
    match cfg.problem {
        ProblemKind::CapacitatedFacilityLocation | ProblemKind::PrioritySteinerForest => {
            Ok(framework(cfg, l, &PredictionSet::default())?.cost)
        }
        p => Ok(run_engine_only(&l.graph, &l.requests, standard_engine(&l.graph, p.demand_kind(), l.root))?.0),
    }
}

/// Exact optimum when the instance is within the oracle budget.
pub fn optimum(cfg: &ExperimentConfig, l: &Loaded) -> Option<Exact> {
    let r = match cfg.problem {
        ProblemKind::CapacitatedFacilityLocation => exact_capacitated_fl(&l.graph, &vertices_of(&l.requests)).map(|s| s.cost),
        p => opt_exact(&l.graph, p.demand_kind(), l.root, &l.requests),
    };
    r.ok()
}

fn num(x: &Exact) -> String {
    format!("{:.6}", x.as_f64())
}

fn ratio(x: &Exact, opt: &Option<Exact>) -> String {
    match opt {
        Some(o) if *o > Exact::from_count(0) => format!("{:.6}", (x.clone() / o.clone()).as_f64()),
        _ => String::new(),
    }
}

struct Row {
    fields: Vec<String>,
    frontier: ParetoFrontier<Exact>,
}

pub const RUNS_HEADER: [&str; 14] = [
    "episode",
    "source",
    "drop_rate",
    "add_rate",
    "radius",
    "repetition",
    "predictions",
    "delta_at_zero_d",
    "d_at_zero_delta",
    "framework_cost",
    "engine_cost",
    "opt",
    "framework_ratio",
    "engine_ratio",
];

fn run_episode(cfg: &ExperimentConfig, l: &Loaded, ep: &Episode, engine: &Option<Exact>, opt: &Option<Exact>) -> Result<Row> {
    let (predictions, source, rates, rep) = match &ep.source {
        Source::File(p) => (io::predictions(p, &l.graph)?, p.display().to_string(), None, String::new()),
        Source::Perturbed(p, rep) => (p.apply(&l.graph, &l.requests)?, "perturbed".into(), Some(p.clone()), rep.to_string()),
        Source::Empty => (PredictionSet::default(), "none".into(), None, String::new()),
    };
    let frontier = pareto_frontier(&l.requests, &predictions, &l.graph.metric())?;
    let zero = Exact::from_count(0);
    let delta0 = frontier.points.iter().find(|p| p.matching_cost == zero).map(|p| p.delta);
    let d0 = frontier.points.iter().find(|p| p.delta == 0).map(|p| num(&p.matching_cost));
    let dir = cfg.out.join("episodes").join(format!("{:04}", ep.id));
    io::write(&dir.join("predictions.json"), netpred_core::instance::predictions_to_json(&predictions))?;
    io::write(&dir.join("frontier.csv"), frontier.to_csv())?;
    let mut fw_cost = String::new();
    let mut fw_ratio = String::new();
    if cfg.algorithm != Algorithm::Engine {
        let out = framework(cfg, l, &predictions)?;
        let reports: Vec<Value> = out.reports.iter().map(|r| r.to_json()).collect();
        let doc = json!({ "cost": out.cost.to_string(), "reports": reports, "extra": out.extra });
        io::write(&dir.join("framework.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
        for (i, r) in out.reports.iter().enumerate() {
            io::write(&dir.join(format!("trace_{i}.csv")), r.trace_csv())?;
        }
        fw_cost = num(&out.cost);
        fw_ratio = ratio(&out.cost, opt);
    }
    let (drop, add, radius) = match rates {
        Some(p) => (p.drop_rate.to_string(), p.add_rate.to_string(), p.displacement_radius.to_string()),
        None => (String::new(), String::new(), String::new()),
    };
    let fields = vec![
        ep.id.to_string(),
        source,
        drop,
        add,
        radius,
        rep,
        predictions.len().to_string(),
        delta0.map(|d| d.to_string()).unwrap_or_default(),
        d0.unwrap_or_default(),
        fw_cost,
        engine.as_ref().map(num).unwrap_or_default(),
        opt.as_ref().map(num).unwrap_or_default(),
        fw_ratio,
        engine.as_ref().map(|e| ratio(e, opt)).unwrap_or_default(),
    ];
    Ok(Row { fields, frontier })
}

/// Worker count from `NETPRED_WORKERS`, default all cores.
pub fn workers() -> Result<usize> {
    match std::env::var("NETPRED_WORKERS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("NETPRED_WORKERS={v} is not a number"))?;
            if n == 0 {
                bail!("NETPRED_WORKERS must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Runs every episode and writes `config.json`, `runs.csv`, `frontier.csv`
/// and one directory per episode. Returns the episode count.
pub fn execute(cfg: &ExperimentConfig) -> Result<usize> {
    cfg.validate()?;
    let l = load(cfg)?;
    io::write(&cfg.out.join("config.json"), serde_json::to_string_pretty(cfg)? + "\n")?;
    let engine = if cfg.algorithm != Algorithm::Framework { Some(engine_only(cfg, &l)?) } else { None };
    let opt = optimum(cfg, &l);
    let eps = episodes(cfg);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers()?).build()?;
    let rows: Vec<Result<Row>> =
        pool.install(|| eps.par_iter().map(|ep| run_episode(cfg, &l, ep, &engine, &opt)).collect());
    let mut runs = csv::Writer::from_writer(Vec::new());
    runs.write_record(RUNS_HEADER)?;
    let mut frontier = csv::Writer::from_writer(Vec::new());
    frontier.write_record(["episode", "delta", "D", "k"])?;
    for (ep, row) in eps.iter().zip(rows) {
        let row = row.with_context(|| format!("episode {}", ep.id))?;
        runs.write_record(&row.fields)?;
        for p in &row.frontier.points {
            frontier.write_record([ep.id.to_string(), p.delta.to_string(), num(&p.matching_cost), p.matched().to_string()])?;
        }
    }
    io::write(&cfg.out.join("runs.csv"), runs.into_inner()?)?;
    io::write(&cfg.out.join("frontier.csv"), frontier.into_inner()?)?;
    Ok(eps.len())
}

