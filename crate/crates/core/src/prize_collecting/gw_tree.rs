//! Rooted prize-collecting Steiner tree by Goemans–Williamson moat growing
//! with penalty-capped moats, followed by dead-set pruning.

use super::{PcSolution, PenaltyInstance, PrizeCollectingSolver};
use crate::error::{input, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Copy, Debug, Default)]
pub struct GoemansWilliamsonTree;

struct Moat<T> {
    members: Vec<VertexId>,
    grown: T,
    budget: Extended<T>,
    active: bool,
    rooted: bool,
}

impl<T: Scalar> PrizeCollectingSolver<T> for GoemansWilliamsonTree {
    fn name(&self) -> &'static str {
        "gw-tree"
    }

    fn gamma(&self) -> u32 {
        2
    }

    fn solve(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<PcSolution<T>> {
        if inst.kind != DemandKind::Terminal {
            return input("gw-tree solves Steiner tree instances");
        }
        let root = inst.root.unwrap();
        let n = graph.vertex_count();
        let mut weight = vec![0usize; n];
        for d in &inst.demands {
            if let Demand::Terminal(v) = *d {
                weight[v] += 1;
            }
        }
        let empty = PcSolution::empty(graph, inst, 2)?;
        if weight.iter().enumerate().all(|(v, &w)| w == 0 || v == root) {
            return Ok(empty);
        }
        let forest = grow(graph, inst, root, &weight);
        let edges = prune(graph, root, &weight, forest);
        let grown = PcSolution::build(graph, inst, edges, Vec::new(), vec![None; inst.len()], 2)?;
        Ok(grown.better(empty))
    }
}

/// Returns the tight edges in the root's tree, and the dead sets in order
/// of death.
fn grow<T: Scalar>(
    graph: &WeightedGraph<T>,
    inst: &PenaltyInstance<T>,
    root: VertexId,
    weight: &[usize],
) -> (Vec<EdgeId>, Vec<Vec<VertexId>>) {
    let n = graph.vertex_count();
    let mut comp: Vec<usize> = (0..n).collect();
    let mut moats: Vec<Moat<T>> = (0..n)
        .map(|v| {
            let budget = inst.penalty_for(weight[v]);
            let rooted = v == root;
            Moat { members: vec![v], grown: T::zero(), active: !rooted && budget > Extended::zero(), budget, rooted }
        })
        .collect();
    let mut dead: Vec<Vec<VertexId>> =
        (0..n).filter(|&v| v != root && !moats[v].active).map(|v| vec![v]).collect();
    let mut load = vec![T::zero(); n];
    let mut tight: Vec<EdgeId> = Vec::new();

    loop {
        let mut edge_event: Option<(T, EdgeId)> = None;
        for (id, e) in graph.edges().iter().enumerate() {
            let (a, b) = (comp[e.u], comp[e.v]);
            if a == b {
                continue;
            }
            let rate = moats[a].active as i64 + moats[b].active as i64;
            if rate == 0 {
                continue;
            }
            let slack = (e.cost.clone() - load[e.u].clone() - load[e.v].clone()).positive_part();
            let t = slack / T::from_ratio(rate, 1);
            if edge_event.as_ref().map_or(true, |(bt, _)| t < *bt) {
                edge_event = Some((t, id));
            }
        }
        let mut death: Option<(T, usize)> = None;
        for (id, m) in moats.iter().enumerate() {
            if let (true, Extended::Finite(b)) = (m.active, &m.budget) {
                let t = (b.clone() - m.grown.clone()).positive_part();
                if death.as_ref().map_or(true, |(bt, _)| t < *bt) {
                    death = Some((t, id));
                }
            }
        }
        let take_edge = match (&edge_event, &death) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some((te, _)), Some((td, _))) => te <= td,
        };
        let eps = if take_edge { edge_event.as_ref().unwrap().0.clone() } else { death.as_ref().unwrap().0.clone() };
        for m in moats.iter_mut().filter(|m| m.active) {
            m.grown = m.grown.clone() + eps.clone();
            for &v in &m.members {
                load[v] = load[v].clone() + eps.clone();
            }
        }
        if take_edge {
            let id = edge_event.unwrap().1;
            let e = graph.edge(id);
            let (a, b) = (comp[e.u], comp[e.v]);
            let absorbed = std::mem::take(&mut moats[b].members);
            for &v in &absorbed {
                comp[v] = a;
            }
            let grown_b = moats[b].grown.clone();
            let budget_b = moats[b].budget.clone();
            let rooted_b = moats[b].rooted;
            moats[b].active = false;
            let m = &mut moats[a];
            m.members.extend(absorbed);
            m.grown = m.grown.clone() + grown_b;
            m.budget = m.budget.add(&budget_b);
            m.rooted |= rooted_b;
            m.active = !m.rooted && Extended::Finite(m.grown.clone()) < m.budget;
            tight.push(id);
        } else {
            let id = death.unwrap().1;
            moats[id].active = false;
            dead.push(moats[id].members.clone());
        }
    }
    let root_comp = comp[root];
    let in_tree: Vec<EdgeId> = tight.into_iter().filter(|&e| comp[graph.edge(e).u] == root_comp).collect();
    (in_tree, dead)
}

fn prune<T: Scalar>(
    graph: &WeightedGraph<T>,
    root: VertexId,
    weight: &[usize],
    (mut edges, dead): (Vec<EdgeId>, Vec<Vec<VertexId>>),
) -> Vec<EdgeId> {
    let n = graph.vertex_count();
    let mut inside = vec![false; n];
    let mut changed = true;
    while changed {
        changed = false;
        for set in dead.iter().rev() {
            for &v in set {
                inside[v] = true;
            }
            let crossing = edges.iter().filter(|&&e| inside[graph.edge(e).u] != inside[graph.edge(e).v]).count();
            if crossing == 1 && !inside[root] {
                edges.retain(|&e| !inside[graph.edge(e).u] && !inside[graph.edge(e).v]);
                changed = true;
            }
            for &v in set {
                inside[v] = false;
            }
        }
    }
    // Steiner leaves
    loop {
        let mut degree = vec![0usize; n];
        for &e in &edges {
            degree[graph.edge(e).u] += 1;
            degree[graph.edge(e).v] += 1;
        }
        let before = edges.len();
        edges.retain(|&e| {
            let ed = graph.edge(e);
            let leaf = |v: VertexId| degree[v] == 1 && v != root && weight[v] == 0;
            !(leaf(ed.u) || leaf(ed.v))
        });
        if edges.len() == before {
            break;
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: u64) -> Q {
        Q::from_ratio(n, d)
    }

    fn star_instance(penalty: Extended<Q>) -> (WeightedGraph<Q>, PenaltyInstance<Q>) {
        let mut g = WeightedGraph::new(4);
        for i in 1..=3 {
            g.add_edge(0, i, q(1, 1)).unwrap();
        }
        let demands = (1..=3).map(Demand::Terminal).collect();
        let inst = PenaltyInstance::new(&g, DemandKind::Terminal, demands, penalty, Some(0)).unwrap();
        (g, inst)
    }

    #[test]
    fn zero_penalty_serves_nothing() {
        let (g, inst) = star_instance(Extended::Finite(q(0, 1)));
        let s = GoemansWilliamsonTree.solve(&g, &inst).unwrap();
        assert!(s.edges.is_empty());
        assert_eq!(s.unsatisfied_count(), 3);
    }

    #[test]
    fn infinite_penalty_buys_edge() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(7, 1)).unwrap();
        let inst =
            PenaltyInstance::new(&g, DemandKind::Terminal, vec![Demand::Terminal(1)], Extended::Infinite, Some(0))
                .unwrap();
        let s = GoemansWilliamsonTree.solve(&g, &inst).unwrap();
        assert_eq!(s.edges, vec![0]);
        assert_eq!(s.objective, Extended::Finite(q(7, 1)));
    }

    #[test]
    fn star_penalties() {
        let (g, inst) = star_instance(Extended::Finite(q(6, 10)));
        let s = GoemansWilliamsonTree.solve(&g, &inst).unwrap();
        assert_eq!(s.objective, Extended::Finite(q(18, 10)));
        let (g, inst) = star_instance(Extended::Finite(q(3, 2)));
        let s = GoemansWilliamsonTree.solve(&g, &inst).unwrap();
        assert_eq!(s.objective, Extended::Finite(q(3, 1)));
        s.verify(&g, &inst).unwrap();
    }

    #[test]
    fn dead_branch_is_pruned() {
        // 0 - 1 - 2 with a cheap terminal at 1 and a far worthless one at 2
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(1, 1)).unwrap();
        g.add_edge(1, 2, q(10, 1)).unwrap();
        let inst = PenaltyInstance::new(
            &g,
            DemandKind::Terminal,
            vec![Demand::Terminal(1), Demand::Terminal(2)],
            Extended::Finite(q(2, 1)),
            Some(0),
        )
        .unwrap();
        let s = GoemansWilliamsonTree.solve(&g, &inst).unwrap();
        assert_eq!(s.edges, vec![0]);
        assert_eq!(s.objective, Extended::Finite(q(3, 1)));
    }
}
