//! Small seeded instances that every oracle can solve.

use crate::error::{input, Result};
use crate::generators::{add_facilities, random_demands, random_graph};
use crate::graph::{VertexId, WeightedGraph};
use crate::oracles::{exact_facility_location, exact_steiner_forest, exact_steiner_tree};
use crate::perturb::Perturbation;
use crate::request::{sequence, Demand, DemandKind, PredictionSet, Request};
use crate::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Small {
    pub kind: DemandKind,
    pub graph: WeightedGraph<Exact>,
    pub root: Option<VertexId>,
    pub requests: Vec<Request>,
    pub predictions: PredictionSet,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_requests: usize,
    pub max_predictions: usize,
}

impl Limits {
    pub const DEFAULT: Limits = Limits { max_requests: 8, max_predictions: 10 };
}

pub const KINDS: [DemandKind; 3] = [DemandKind::Terminal, DemandKind::TerminalPair, DemandKind::Client];

/// Random graph (at most 14 edges; 12 for forests), demands, and a
/// prediction that mixes a perturbed copy of the requests with noise.
pub fn small(kind: DemandKind, seed: u64, limits: Limits) -> Result<Small> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=8usize);
    let max_edges = if kind == DemandKind::TerminalPair { 12 } else { 14 };
    let extra = rng.gen_range(0..=(max_edges - (n - 1)).min(5));
    let mut graph = random_graph(&mut rng, n, extra, 9);
    if kind == DemandKind::Client {
        add_facilities(&mut rng, &mut graph, 1, 12, 0.6);
    }
    let count = rng.gen_range(1..=limits.max_requests.max(1));
    let requests = sequence(random_demands(&mut rng, &graph, kind, count, 1)?);
    let pert = Perturbation {
        drop_rate: rng.gen_range(0.0..0.5),
        add_rate: rng.gen_range(0.0..0.6),
        displacement_radius: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(1.0..8.0) },
        seed: rng.gen(),
    };
    let mut predictions = pert.apply(&graph, &requests)?;
    predictions.items.truncate(limits.max_predictions);
    let root = (kind == DemandKind::Terminal).then_some(0);
    Ok(Small { kind, graph, root, requests, predictions })
}

pub fn vertices_of(requests: &[Request]) -> Vec<VertexId> {
    requests.iter().flat_map(|r| r.demand.vertices()).collect()
}

/// Exact optimum of the whole request set.
pub fn opt_exact(graph: &WeightedGraph<Exact>, kind: DemandKind, root: Option<VertexId>, requests: &[Request]) -> Result<Exact> {
    Ok(match kind {
        DemandKind::Terminal => {
            let Some(root) = root else { return input("Steiner tree needs a root") };
            exact_steiner_tree(graph, &vertices_of(requests), root)?.cost
        }
        DemandKind::TerminalPair => {
            let pairs: Vec<(VertexId, VertexId, u32)> = requests
                .iter()
                .filter_map(|r| match r.demand {
                    Demand::TerminalPair { s, t, priority } if s != t => Some((s, t, priority)),
                    _ => None,
                })
                .collect();
            exact_steiner_forest(graph, &pairs)?.cost
        }
        DemandKind::Client => exact_facility_location(graph, &vertices_of(requests))?.cost,
    })
}

impl Small {
    pub fn opt(&self) -> Result<Exact> {
        opt_exact(&self.graph, self.kind, self.root, &self.requests)
    }
}
