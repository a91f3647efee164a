use crate::io;
use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use netpred_core::adversaries::diamond::diamond_run;
use netpred_core::adversaries::{fotakis_lb_tree, nk_delta_adversary, play, DiamondInstance, FotakisLbAdversary, NkVariant, Transcript};
use netpred_core::engines::{Fotakis, GreedyTree};
use netpred_core::generators::{add_capacities, add_facilities, geometric_graph, path, random_demands, random_graph, star, with_priorities};
use netpred_core::instance::{predictions_to_json, requests_to_json, InstanceFile};
use netpred_core::request::{sequence, DemandKind, PredictionSet, ProblemKind, Request};
use netpred_core::{Exact, Scalar, WeightedGraph, ZeroCostOverlay};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Geometric,
    Star,
    Path,
    Diamond,
    Fotakis,
    NkDelta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Unpredicted,
    Intersection,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 10)]
    pub vertices: usize,
    /// Edges beyond the spanning tree (random family).
    #[arg(long, default_value_t = 5)]
    pub extra_edges: usize,
    #[arg(long, default_value_t = 9)]
    pub max_cost: u64,
    /// Nearest predecessors joined (geometric family).
    #[arg(long, default_value_t = 3)]
    pub neighbors: usize,
    #[arg(long, default_value_t = 20)]
    pub side: u32,
    /// Number of random requests.
    #[arg(long, default_value_t = 6)]
    pub requests: usize,
    /// Largest facility cost.
    #[arg(long, default_value_t = 20)]
    pub max_facility_cost: u64,
    #[arg(long, default_value_t = 4)]
    pub max_capacity: u64,
    /// Priority classes (priority Steiner forest).
    #[arg(long, default_value_t = 2)]
    pub priorities: u32,
    /// Diamond depth.
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Fotakis tree height.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value_t = 4)]
    pub delta1: usize,
    #[arg(long, default_value_t = 2)]
    pub delta2: usize,
    #[arg(long, value_enum, default_value_t = Variant::Unpredicted)]
    pub variant: Variant,
}

pub struct Generated {
    pub graph: WeightedGraph<Exact>,
    pub root: Option<usize>,
    pub requests: Vec<Request>,
    pub predictions: Option<PredictionSet>,
    pub transcript: Option<Transcript<Exact>>,
}

fn decorate(rng: &mut ChaCha8Rng, g: WeightedGraph<Exact>, problem: ProblemKind, a: &GenArgs) -> WeightedGraph<Exact> {
    let mut g = g;
    match problem {
        ProblemKind::FacilityLocation | ProblemKind::CapacitatedFacilityLocation => {
            add_facilities(rng, &mut g, 1, a.max_facility_cost.max(1), 0.5);
            if problem == ProblemKind::CapacitatedFacilityLocation {
                add_capacities(rng, &mut g, a.max_capacity);
            }
        }
        ProblemKind::PrioritySteinerForest => g = with_priorities(rng, &g, a.priorities.max(1)),
        _ => {}
    }
    g
}

fn require(problem: ProblemKind, allowed: &[ProblemKind], family: &str) -> Result<()> {
    if !allowed.contains(&problem) {
        let names: Vec<&str> = allowed.iter().map(|p| p.name()).collect();
        bail!("the {family} family is defined for {} only, not {problem}", names.join(", "));
    }
    Ok(())
}

pub fn generate(a: &GenArgs, problem: ProblemKind, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = problem.demand_kind();
    let root = (kind == DemandKind::Terminal).then_some(0);
    let base = match a.family {
        Family::Random => Some(random_graph(&mut rng, a.vertices, a.extra_edges, a.max_cost.max(1))),
        Family::Geometric => Some(geometric_graph(&mut rng, a.vertices, a.neighbors, a.side.max(1))),
        Family::Star => Some(star(a.vertices.saturating_sub(1).max(1), Exact::from_count(1))),
        Family::Path => Some(path(a.vertices.max(2), Exact::from_count(1))),
        _ => None,
    };
    if let Some(g) = base {
        let g = decorate(&mut rng, g, problem, a);
        let b = if problem == ProblemKind::PrioritySteinerForest { a.priorities.max(1) } else { 1 };
        let requests = sequence(random_demands(&mut rng, &g, kind, a.requests, b)?);
        return Ok(Generated { graph: g, root, requests, predictions: None, transcript: None });
    }
    match a.family {
        Family::Diamond => {
            require(problem, &[ProblemKind::SteinerTree], "diamond")?;
            let inst = DiamondInstance::<Exact>::new(a.depth);
            let mut engine = GreedyTree::new(&inst.graph, inst.root, ZeroCostOverlay::new(&inst.graph))?;
            let run = diamond_run(&inst, &mut engine)?;
            Ok(Generated {
                requests: run.transcript.requests(),
                graph: inst.graph.clone(),
                root: Some(inst.root),
                predictions: None,
                transcript: Some(run.transcript),
            })
        }
        Family::Fotakis => {
            require(problem, &[ProblemKind::FacilityLocation], "fotakis")?;
            let tree = fotakis_lb_tree::<Exact>(a.m)?;
            let mut engine = Fotakis::new(&tree.graph, ZeroCostOverlay::new(&tree.graph))?;
            let transcript = play(&mut FotakisLbAdversary::new(&tree), &mut engine)?;
            Ok(Generated { requests: transcript.requests(), graph: tree.graph, root: None, predictions: None, transcript: Some(transcript) })
        }
        Family::NkDelta => {
            require(problem, &[ProblemKind::SteinerTree, ProblemKind::FacilityLocation], "nk-delta")?;
            let variant = match a.variant {
                Variant::Unpredicted => NkVariant::Unpredicted,
                Variant::Intersection => NkVariant::Intersection,
            };
            let inst = nk_delta_adversary::<Exact>(a.n, a.k, a.delta1, a.delta2, kind, variant)?;
            let transcript = match kind {
                DemandKind::Terminal => {
                    let r = inst.root.unwrap_or(0);
                    inst.play(&mut GreedyTree::new(&inst.graph, r, ZeroCostOverlay::new(&inst.graph))?)?
                }
                _ => inst.play(&mut Fotakis::new(&inst.graph, ZeroCostOverlay::new(&inst.graph))?)?,
            };
            Ok(Generated {
                requests: transcript.requests(),
                graph: inst.graph.clone(),
                root: inst.root,
                predictions: Some(inst.predictions.clone()),
                transcript: Some(transcript),
            })
        }
        _ => unreachable!("graph families handled above"),
    }
}

/// Writes `instance.json`, `requests.json` and, when the family has them,
/// `predictions.json` and `transcript.csv`.
pub fn write(out: &Path, g: &Generated) -> Result<()> {
    let file = InstanceFile::from_graph(&g.graph, g.root, None)?;
    io::write(&out.join("instance.json"), file.to_json())?;
    io::write(&out.join("requests.json"), requests_to_json(&g.requests))?;
    if let Some(p) = &g.predictions {
        io::write(&out.join("predictions.json"), predictions_to_json(p))?;
    }
    if let Some(t) = &g.transcript {
        io::write(&out.join("transcript.csv"), t.to_csv())?;
    }
    Ok(())
}
