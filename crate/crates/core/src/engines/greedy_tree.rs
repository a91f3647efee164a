//! Greedy online Steiner tree: connect each terminal to the closest of the
//! root and the terminals seen so far.

use super::{wrong_kind, OnlineEngine, ServeRecord};
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph, ZeroCostOverlay};
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};

pub struct GreedyTree<'g, T> {
    graph: &'g WeightedGraph<T>,
    overlay: ZeroCostOverlay,
    root: VertexId,
    terminals: Vec<VertexId>,
    owned: Vec<bool>,
    log: Vec<ServeRecord<T>>,
}

impl<'g, T: Scalar> GreedyTree<'g, T> {
    pub fn new(graph: &'g WeightedGraph<T>, root: VertexId, overlay: ZeroCostOverlay) -> Result<Self> {
        graph.check_vertex(root)?;
        Ok(GreedyTree {
            graph,
            overlay,
            root,
            terminals: Vec::new(),
            owned: vec![false; graph.edge_count()],
            log: Vec::new(),
        })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn overlay(&self) -> &ZeroCostOverlay {
        &self.overlay
    }
}

impl<T: Scalar> OnlineEngine<T> for GreedyTree<'_, T> {
    fn demand_kind(&self) -> DemandKind {
        DemandKind::Terminal
    }

    fn serve(&mut self, demand: &Demand) -> Result<ServeRecord<T>> {
        let Demand::Terminal(r) = *demand else { return wrong_kind("greedy Steiner tree", demand) };
        self.graph.check_vertex(r)?;
        let metric = self.graph.metric().with_overlay(&self.overlay);
        let tree = metric.tree_from(&[r])?;
        let mut best: Option<(VertexId, T)> = None;
        for &x in std::iter::once(&self.root).chain(&self.terminals) {
            if let Extended::Finite(d) = &tree.dist[x] {
                if best.as_ref().map_or(true, |(bx, bd)| *d < *bd || (*d == *bd && x < *bx)) {
                    best = Some((x, d.clone()));
                }
            }
        }
        let Some((target, charged)) = best else {
            return Err(Error::Infeasible(format!("terminal {r} is disconnected from root {}", self.root)));
        };
        let path = tree.path_to(self.graph, target);
        let mut record = ServeRecord::free();
        for e in path {
            if !self.owned[e] {
                self.owned[e] = true;
                if !self.overlay.has_edge(e) {
                    record.actual = record.actual + self.graph.edge(e).cost.clone();
                }
                record.bought_edges.push(e);
            }
        }
        record.charged = charged;
        self.terminals.push(r);
        self.log.push(record.clone());
        Ok(record)
    }

    fn log(&self) -> &[ServeRecord<T>] {
        &self.log
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn star(spokes: usize) -> WeightedGraph<Q> {
        let mut g = WeightedGraph::new(spokes + 1);
        for i in 1..=spokes {
            g.add_edge(0, i, q(1)).unwrap();
        }
        g
    }

    #[test]
    fn star_charges_one_per_spoke() {
        let g = star(3);
        let mut e = GreedyTree::new(&g, 0, ZeroCostOverlay::new(&g)).unwrap();
        for v in 1..=3 {
            assert_eq!(e.serve(&Demand::Terminal(v)).unwrap().charged, q(1));
        }
        assert_eq!(e.total_charged(), q(3));
        assert_eq!(e.serve(&Demand::Terminal(2)).unwrap().charged, q(0));
    }

    #[test]
    fn first_terminal_pays_distance_to_root() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(1)).unwrap();
        g.add_edge(1, 2, q(2)).unwrap();
        let mut e = GreedyTree::new(&g, 0, ZeroCostOverlay::new(&g)).unwrap();
        let r = e.serve(&Demand::Terminal(2)).unwrap();
        assert_eq!((r.charged, r.actual), (q(3), q(3)));
        assert_eq!(r.bought_edges, vec![1, 0]);
    }

    #[test]
    fn overlay_makes_connection_free() {
        let g = star(2);
        let mut o = ZeroCostOverlay::new(&g);
        o.zero_edge(1);
        let mut e = GreedyTree::new(&g, 0, o).unwrap();
        assert_eq!(e.serve(&Demand::Terminal(2)).unwrap().charged, q(0));
        assert!(e.serve(&Demand::pair(1, 2)).is_err());
    }

    #[test]
    fn disconnected_terminal_is_infeasible() {
        let g: WeightedGraph<Q> = WeightedGraph::new(2);
        let mut e = GreedyTree::new(&g, 0, ZeroCostOverlay::new(&g)).unwrap();
        assert!(matches!(e.serve(&Demand::Terminal(1)), Err(Error::Infeasible(_))));
    }
}
