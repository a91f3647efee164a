//! Prize-collecting Steiner forest. An LP relaxation decides which pairs to
//! abandon (`z >= 1/3`); the rest are connected by Goemans–Williamson forest
//! growth with reverse delete.

use super::{PcSolution, PenaltyInstance, PrizeCollectingSolver};
use crate::error::{input, Error, Result};
use crate::graph::{EdgeId, UnionFind, VertexId, WeightedGraph};
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};
use minilp::{ComparisonOp, OptimizationDirection, Problem};

#[derive(Clone, Copy, Debug, Default)]
pub struct LpRoundedForest;

/// Slack on the float LP's abandonment threshold.
const LP_TOLERANCE: f64 = 1e-9;

impl<T: Scalar> PrizeCollectingSolver<T> for LpRoundedForest {
    fn name(&self) -> &'static str {
        "lp-gw-forest"
    }

    fn gamma(&self) -> u32 {
        3
    }

    fn solve(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<PcSolution<T>> {
        if inst.kind != DemandKind::TerminalPair {
            return input("lp-gw-forest solves Steiner forest instances");
        }
        let mut reach = UnionFind::from_edges(graph, &(0..graph.edge_count()).collect::<Vec<_>>());
        // pairs worth considering: distinct endpoints, connectable at all
        let open: Vec<(VertexId, VertexId)> = inst
            .demands
            .iter()
            .filter_map(|d| match *d {
                Demand::TerminalPair { s, t, .. } if s != t && reach.same(s, t) => Some((s, t)),
                _ => None,
            })
            .collect();
        let empty = PcSolution::empty(graph, inst, 3)?;
        if open.is_empty() || inst.penalty == Extended::zero() {
            return Ok(empty);
        }
        let all = PcSolution::build(graph, inst, gw_forest(graph, &open), Vec::new(), vec![None; inst.len()], 3)?;
        let Extended::Finite(x) = &inst.penalty else { return Ok(all) };
        let z = lp_abandonment(graph, &open, x.as_f64())?;
        let kept: Vec<(VertexId, VertexId)> =
            open.iter().zip(&z).filter(|(_, &z)| z < 1.0 / 3.0 - LP_TOLERANCE).map(|(p, _)| *p).collect();
        let rounded = PcSolution::build(graph, inst, gw_forest(graph, &kept), Vec::new(), vec![None; inst.len()], 3)?;
        Ok(rounded.better(all).better(empty))
    }
}

/// Optimal `z` per pair of the flow relaxation.
fn lp_abandonment<T: Scalar>(graph: &WeightedGraph<T>, pairs: &[(VertexId, VertexId)], penalty: f64) -> Result<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let x: Vec<_> = graph.edges().iter().map(|e| lp.add_var(e.cost.as_f64(), (0.0, 1.0))).collect();
    let n = graph.vertex_count();
    let mut z = Vec::with_capacity(pairs.len());
    for &(s, t) in pairs {
        let zi = lp.add_var(penalty, (0.0, 1.0));
        z.push(zi);
        let fwd: Vec<_> = graph.edges().iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
        let bwd: Vec<_> = graph.edges().iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
        let mut balance: Vec<Vec<(minilp::Variable, f64)>> = vec![Vec::new(); n];
        for (id, e) in graph.edges().iter().enumerate() {
            balance[e.u].push((fwd[id], 1.0));
            balance[e.v].push((fwd[id], -1.0));
            balance[e.v].push((bwd[id], 1.0));
            balance[e.u].push((bwd[id], -1.0));
            lp.add_constraint([(fwd[id], 1.0), (bwd[id], 1.0), (x[id], -1.0)], ComparisonOp::Le, 0.0);
        }
        // outflow at s is 1 - z, inflow at t is 1 - z
        balance[s].push((zi, 1.0));
        balance[t].push((zi, -1.0));
        for (v, terms) in balance.into_iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let rhs = if v == s { 1.0 } else if v == t { -1.0 } else { 0.0 };
            lp.add_constraint(terms, ComparisonOp::Eq, rhs);
        }
    }
    let solution = lp.solve().map_err(|e| Error::Solver(format!("forest LP: {e}")))?;
    Ok(z.iter().map(|&v| solution[v]).collect())
}

/// Forest connecting every pair: moats grow while they separate a pair;
/// unneeded edges are then dropped in reverse order of addition.
pub(crate) fn gw_forest<T: Scalar>(graph: &WeightedGraph<T>, pairs: &[(VertexId, VertexId)]) -> Vec<EdgeId> {
    let n = graph.vertex_count();
    if pairs.is_empty() {
        return Vec::new();
    }
    let mut uf = UnionFind::new(n);
    let mut load = vec![T::zero(); n];
    let mut added: Vec<EdgeId> = Vec::new();
    loop {
        let mut active = vec![false; n];
        for &(s, t) in pairs {
            let (a, b) = (uf.find(s), uf.find(t));
            if a != b {
                active[a] = true;
                active[b] = true;
            }
        }
        let roots: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
        let mut best: Option<(T, EdgeId)> = None;
        for (id, e) in graph.edges().iter().enumerate() {
            let (a, b) = (roots[e.u], roots[e.v]);
            if a == b {
                continue;
            }
            let rate = active[a] as i64 + active[b] as i64;
            if rate == 0 {
                continue;
            }
            let slack = (e.cost.clone() - load[e.u].clone() - load[e.v].clone()).positive_part();
            let t = slack / T::from_ratio(rate, 1);
            if best.as_ref().map_or(true, |(bt, _)| t < *bt) {
                best = Some((t, id));
            }
        }
        // callers only pass connectable pairs
        let Some((eps, id)) = best else { break };
        for v in 0..n {
            if active[roots[v]] {
                load[v] = load[v].clone() + eps.clone();
            }
        }
        let e = graph.edge(id);
        uf.union(e.u, e.v);
        added.push(id);
    }
    let mut keep = added.clone();
    for &e in added.iter().rev() {
        let trial: Vec<EdgeId> = keep.iter().copied().filter(|&f| f != e).collect();
        let mut uf = UnionFind::from_edges(graph, &trial);
        if pairs.iter().all(|&(s, t)| uf.same(s, t)) {
            keep = trial;
        }
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn pc(g: &WeightedGraph<Q>, demands: Vec<Demand>, x: Extended<Q>) -> PcSolution<Q> {
        let inst = PenaltyInstance::new(g, DemandKind::TerminalPair, demands, x, None).unwrap();
        let s = LpRoundedForest.solve(g, &inst).unwrap();
        s.verify(g, &inst).unwrap();
        s
    }

    #[test]
    fn zero_penalty_is_empty() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(2)).unwrap();
        let s = pc(&g, vec![Demand::pair(0, 1)], Extended::Finite(q(0)));
        assert!(s.edges.is_empty());
    }

    #[test]
    fn single_pair_bought() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(2)).unwrap();
        let s = pc(&g, vec![Demand::pair(0, 1)], Extended::Finite(q(10)));
        assert_eq!(s.objective, Extended::Finite(q(2)));
    }

    #[test]
    fn reverse_delete_drops_unneeded_edges() {
        // path 0-1-2-3 with pairs (0,1) and (2,3): the middle edge goes
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, q(2)).unwrap();
        g.add_edge(1, 2, q(1)).unwrap();
        g.add_edge(2, 3, q(2)).unwrap();
        assert_eq!(gw_forest(&g, &[(0, 1), (2, 3)]), vec![0, 2]);
    }

    #[test]
    fn expensive_pair_abandoned() {
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, q(1)).unwrap();
        g.add_edge(2, 3, q(50)).unwrap();
        let s = pc(&g, vec![Demand::pair(0, 1), Demand::pair(2, 3)], Extended::Finite(q(5)));
        assert_eq!(s.satisfied, vec![true, false]);
        assert_eq!(s.objective, Extended::Finite(q(6)));
    }

    #[test]
    fn disconnected_pair_pays() {
        let g: WeightedGraph<Q> = WeightedGraph::new(2);
        let s = pc(&g, vec![Demand::pair(0, 1)], Extended::Infinite);
        assert_eq!(s.objective, Extended::Infinite);
    }
}
