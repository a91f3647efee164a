//! Seeded instance generators. All costs are small integers so the exact
//! and float scalars agree.

use crate::adversaries::{play, DiamondAdversary, DiamondInstance, Player, Then, Transcript};
use crate::error::{input, Result};
use crate::graph::{Priority, VertexId, WeightedGraph};
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random spanning tree plus `extra` random edges, costs in `1..=max_cost`.
pub fn random_graph<T: Scalar, R: Rng>(rng: &mut R, vertices: usize, extra: usize, max_cost: u64) -> WeightedGraph<T> {
    let mut g = WeightedGraph::new(vertices);
    let mut order: Vec<VertexId> = (0..vertices).collect();
    order.shuffle(rng);
    for i in 1..vertices {
        let parent = order[rng.gen_range(0..i)];
        let cost = rng.gen_range(1..=max_cost);
        g.add_edge(parent, order[i], T::from_count(cost as usize)).expect("distinct vertices");
    }
    if vertices >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..vertices);
            let mut v = rng.gen_range(0..vertices - 1);
            if v >= u {
                v += 1;
            }
            let cost = rng.gen_range(1..=max_cost);
            g.add_edge(u, v, T::from_count(cost as usize)).expect("distinct vertices");
        }
    }
    g
}

/// Points on a `side × side` grid, each joined to its `k` nearest
/// predecessors, cost the rounded-up Euclidean distance (at least 1).
pub fn geometric_graph<T: Scalar, R: Rng>(rng: &mut R, vertices: usize, k: usize, side: u32) -> WeightedGraph<T> {
    let pts: Vec<(i64, i64)> =
        (0..vertices).map(|_| (rng.gen_range(0..side) as i64, rng.gen_range(0..side) as i64)).collect();
    let mut g = WeightedGraph::new(vertices);
    for i in 1..vertices {
        let mut near: Vec<(i64, usize)> = (0..i)
            .map(|j| {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                (dx * dx + dy * dy, j)
            })
            .collect();
        near.sort_unstable();
        for &(sq, j) in near.iter().take(k.max(1)) {
            let cost = ((sq as f64).sqrt().ceil() as usize).max(1);
            g.add_edge(i, j, T::from_count(cost)).expect("distinct vertices");
        }
    }
    g
}

/// Center 0 with `spokes` leaves.
pub fn star<T: Scalar>(spokes: usize, cost: T) -> WeightedGraph<T> {
    let mut g = WeightedGraph::new(spokes + 1);
    for leaf in 1..=spokes {
        g.add_edge(0, leaf, cost.clone()).expect("distinct vertices");
    }
    g
}

pub fn path<T: Scalar>(vertices: usize, cost: T) -> WeightedGraph<T> {
    let mut g = WeightedGraph::new(vertices);
    for v in 1..vertices {
        g.add_edge(v - 1, v, cost.clone()).expect("distinct vertices");
    }
    g
}

/// Facility costs in `lo..=hi` on every vertex with probability `density`
/// (at least one site overall).
pub fn add_facilities<T: Scalar, R: Rng>(rng: &mut R, g: &mut WeightedGraph<T>, lo: u64, hi: u64, density: f64) {
    let n = g.vertex_count();
    let mut any = false;
    for v in 0..n {
        if rng.gen_bool(density.clamp(0.0, 1.0)) {
            g.set_facility_cost(v, Some(T::from_count(rng.gen_range(lo..=hi) as usize))).unwrap();
            any = true;
        } else {
            g.set_facility_cost(v, None).unwrap();
        }
    }
    if !any && n > 0 {
        let v = rng.gen_range(0..n);
        g.set_facility_cost(v, Some(T::from_count(rng.gen_range(lo..=hi) as usize))).unwrap();
    }
}

/// Capacities in `1..=max` on every facility site.
pub fn add_capacities<T: Scalar, R: Rng>(rng: &mut R, g: &mut WeightedGraph<T>, max: u64) {
    for v in g.facility_sites() {
        g.set_capacity(v, rng.gen_range(1..=max.max(1))).unwrap();
    }
}

/// Rebuilds `g` with edge priorities drawn from `1..=b`.
pub fn with_priorities<T: Scalar, R: Rng>(rng: &mut R, g: &WeightedGraph<T>, b: Priority) -> WeightedGraph<T> {
    let mut out = WeightedGraph::new(g.vertex_count());
    for e in g.edges() {
        out.add_edge_with_priority(e.u, e.v, e.cost.clone(), rng.gen_range(1..=b.max(1))).unwrap();
    }
    for v in 0..g.vertex_count() {
        if g.has_facility_data() {
            out.set_facility_cost(v, g.facility_cost(v).cloned()).unwrap();
        }
        if let Some(beta) = g.capacity(v) {
            out.set_capacity(v, beta).unwrap();
        }
    }
    out
}

/// `count` random demands. Pairs get distinct endpoints and a priority in
/// `1..=b`; with `b > 1` a pair is only drawn if it is connected in `G_j`.
pub fn random_demands<T: Scalar, R: Rng>(
    rng: &mut R,
    g: &WeightedGraph<T>,
    kind: DemandKind,
    count: usize,
    b: Priority,
) -> Result<Vec<Demand>> {
    let n = g.vertex_count();
    if n == 0 || (kind == DemandKind::TerminalPair && n < 2) {
        return input("graph too small for the requested demands");
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let d = match kind {
            DemandKind::Terminal => Demand::Terminal(rng.gen_range(0..n)),
            DemandKind::Client => Demand::Client(rng.gen_range(0..n)),
            DemandKind::TerminalPair => {
                let mut tries = 0;
                loop {
                    let s = rng.gen_range(0..n);
                    let mut t = rng.gen_range(0..n - 1);
                    if t >= s {
                        t += 1;
                    }
                    let priority = rng.gen_range(1..=b.max(1));
                    let reachable = g.metric().with_floor(priority).distance(s, t)?.is_finite();
                    if reachable || tries > 64 {
                        break Demand::TerminalPair { s, t, priority: if reachable { priority } else { 1 } };
                    }
                    tries += 1;
                }
            }
        };
        out.push(d);
    }
    Ok(out)
}

/// Two diamond arms `I_d` sharing the root. The request sequence is the
/// diamond adversary played arm by arm against an online player.
#[derive(Clone, Debug)]
pub struct StarComposite<T> {
    pub transcript: Transcript<T>,
    /// Sum of the arms' adversary path costs.
    pub opt: T,
    /// Each path costs exactly `d(root, far)`; arms meet only at the root,
    /// so no tree is cheaper.
    pub opt_certified: bool,
}

impl<T: Scalar> StarComposite<T> {
    pub fn request_count(&self) -> usize {
        self.transcript.steps.len()
    }
}

/// Graph of the star-composite family: `DiamondInstance::with_arms(depth, 2)`.
pub fn star_composite_graph<T: Scalar>(depth: u32) -> DiamondInstance<T> {
    DiamondInstance::with_arms(depth, 2)
}

/// Plays both arms of `inst` against `player`.
pub fn star_composite<T: Scalar>(inst: &DiamondInstance<T>, player: &mut dyn Player<T>) -> Result<StarComposite<T>> {
    if inst.arms.len() != 2 {
        return input("star composite needs two arms");
    }
    let mut adv = Then(DiamondAdversary::for_arm(inst, 0), DiamondAdversary::for_arm(inst, 1));
    let transcript = play(&mut adv, player)?;
    let metric = inst.graph.metric();
    let mut opt = T::zero();
    let mut certified = true;
    for path in [adv.0.path(), adv.1.path()] {
        let far = *path.last().unwrap();
        let mut cost = T::zero();
        for w in path.windows(2) {
            match metric.distance(w[0], w[1])? {
                Extended::Finite(d) => cost = cost + d,
                Extended::Infinite => return input("diamond path is disconnected"),
            }
        }
        certified &= metric.distance(inst.root, far)? == Extended::Finite(cost.clone());
        opt = opt + cost;
    }
    Ok(StarComposite { transcript, opt, opt_certified: certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::GreedyTree;
    use crate::graph::ZeroCostOverlay;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;

    #[test]
    fn random_graph_is_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 7, 12] {
            let g: WeightedGraph<Q> = random_graph(&mut rng, n, 4, 9);
            assert!(g.metric().check_reachable(0, &(0..n).collect::<Vec<_>>()).is_ok());
        }
    }

    #[test]
    fn geometric_is_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g: WeightedGraph<Q> = geometric_graph(&mut rng, 15, 2, 20);
        assert!(g.metric().check_reachable(0, &(0..15).collect::<Vec<_>>()).is_ok());
    }

    #[test]
    fn seeded_generation_repeats() {
        let a: WeightedGraph<Q> = random_graph(&mut ChaCha8Rng::seed_from_u64(9), 10, 5, 7);
        let b: WeightedGraph<Q> = random_graph(&mut ChaCha8Rng::seed_from_u64(9), 10, 5, 7);
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn star_composite_counts() {
        for d in 1..=3 {
            let inst = star_composite_graph::<Q>(d);
            let mut e = GreedyTree::new(&inst.graph, 0, ZeroCostOverlay::new(&inst.graph)).unwrap();
            let sc = star_composite(&inst, &mut e).unwrap();
            assert_eq!(sc.request_count(), 1 << (d + 1));
            assert!(sc.opt_certified);
            assert_eq!(sc.opt, Q::from_integer((2i64 << d).into()));
        }
    }
}
