//! Berman–Coulston online Steiner forest with per-level ball systems.
//!
//! Each paid pair lands on level `l = floor(log2 c(P))` and either adds a
//! ball of radius `2^(l-2)` around one endpoint, or, when both endpoint
//! balls hit existing balls, connects each endpoint to one of them and
//! records an edge in that level's meta-graph.

use super::{wrong_kind, OnlineEngine, ServeRecord};
use crate::error::{Error, Result};
use crate::graph::{balls_meet, EdgeId, Priority, VertexId, WeightedGraph, ZeroCostOverlay};
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};
use std::collections::{BTreeMap, HashMap};

/// Balls of one level and the meta-graph over them.
#[derive(Clone, Debug, Default)]
pub struct Level {
    /// Ball centers, in insertion order; a ball is referred to by index.
    pub centers: Vec<VertexId>,
    pub meta_edges: Vec<(usize, usize)>,
    /// Requests whose level was this one.
    pub iterations: usize,
    parent: Vec<usize>,
}

impl Level {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn add_ball(&mut self, center: VertexId) {
        self.parent.push(self.centers.len());
        self.centers.push(center);
    }

    /// Adds a meta-edge; returns whether it closed a cycle.
    fn add_edge(&mut self, a: usize, b: usize) -> bool {
        self.meta_edges.push((a, b));
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            true
        } else {
            self.parent[ra] = rb;
            false
        }
    }
}

pub struct BermanCoulston<'g, T> {
    graph: &'g WeightedGraph<T>,
    /// Framework overlay; ball distances use it.
    base: ZeroCostOverlay,
    /// Framework overlay plus everything bought.
    bought: ZeroCostOverlay,
    floor: Priority,
    levels: BTreeMap<i32, Level>,
    rows: HashMap<VertexId, Vec<Extended<T>>>,
    cycle_detected: bool,
    log: Vec<ServeRecord<T>>,
}

impl<'g, T: Scalar> BermanCoulston<'g, T> {
    pub fn new(graph: &'g WeightedGraph<T>, overlay: ZeroCostOverlay) -> Self {
        Self::with_floor(graph, overlay, 1)
    }

    /// Engine restricted to edges of priority at least `floor`.
    pub fn with_floor(graph: &'g WeightedGraph<T>, overlay: ZeroCostOverlay, floor: Priority) -> Self {
        BermanCoulston {
            graph,
            bought: overlay.clone(),
            base: overlay,
            floor,
            levels: BTreeMap::new(),
            rows: HashMap::new(),
            cycle_detected: false,
            log: Vec::new(),
        }
    }

    pub fn levels(&self) -> &BTreeMap<i32, Level> {
        &self.levels
    }

    /// True if some meta-edge ever closed a cycle.
    pub fn cycle_detected(&self) -> bool {
        self.cycle_detected
    }

    fn base_distance(&mut self, u: VertexId, v: VertexId) -> Result<Extended<T>> {
        if !self.rows.contains_key(&u) {
            let m = self.graph.metric().with_overlay(&self.base).with_floor(self.floor);
            self.rows.insert(u, m.distances_from(u)?);
        }
        Ok(self.rows[&u][v].clone())
    }

    /// Smallest-center ball of level `l` meeting `B(v, r)`.
    fn intersecting(&mut self, l: i32, v: VertexId, r: &T) -> Result<Option<usize>> {
        let Some(level) = self.levels.get(&l) else { return Ok(None) };
        let centers = level.centers.clone();
        let mut best: Option<(VertexId, usize)> = None;
        for (i, c) in centers.into_iter().enumerate() {
            let d = self.base_distance(v, c)?;
            if balls_meet(&d, r, r) && best.map_or(true, |(bc, _)| c < bc) {
                best = Some((c, i));
            }
        }
        Ok(best.map(|(_, i)| i))
    }

    /// Shortest path under the current bought set; buys it and returns its
    /// cost and new edges.
    fn buy_path(&mut self, u: VertexId, v: VertexId) -> Result<(T, Vec<EdgeId>)> {
        let m = self.graph.metric().with_overlay(&self.bought).with_floor(self.floor);
        let p = m.shortest_path(u, v)?;
        let Extended::Finite(cost) = p.cost else {
            return Err(Error::Infeasible(format!("{u} and {v} are disconnected at priority {}", self.floor)));
        };
        let mut new_edges = Vec::new();
        for e in p.edges {
            if !self.bought.has_edge(e) {
                self.bought.zero_edge(e);
                new_edges.push(e);
            }
        }
        Ok((cost, new_edges))
    }

    fn paths_cost(&self, first: &[EdgeId], second: &[EdgeId]) -> T {
        let mut seen: Vec<EdgeId> = first.to_vec();
        let mut total = first.iter().fold(T::zero(), |acc, &e| acc + self.graph.edge(e).cost.clone());
        for &e in second {
            if !seen.contains(&e) {
                seen.push(e);
                total = total + self.graph.edge(e).cost.clone();
            }
        }
        total
    }
}

impl<T: Scalar> OnlineEngine<T> for BermanCoulston<'_, T> {
    fn demand_kind(&self) -> DemandKind {
        DemandKind::TerminalPair
    }

    fn serve(&mut self, demand: &Demand) -> Result<ServeRecord<T>> {
        let Demand::TerminalPair { s, t, .. } = *demand else { return wrong_kind("Berman-Coulston", demand) };
        self.graph.check_vertex(s)?;
        self.graph.check_vertex(t)?;
        let (cost, mut bought) = self.buy_path(s, t)?;
        let mut record = ServeRecord::free();
        record.actual = cost.clone();
        if cost > T::zero() {
            let l = cost.floor_log2();
            let r = T::pow2(l - 2);
            self.levels.entry(l).or_default().iterations += 1;
            let hit_s = self.intersecting(l, s, &r)?;
            let hit_t = if hit_s.is_some() { self.intersecting(l, t, &r)? } else { None };
            match (hit_s, hit_t) {
                (None, _) => self.levels.get_mut(&l).unwrap().add_ball(s),
                (Some(_), None) => self.levels.get_mut(&l).unwrap().add_ball(t),
                (Some(a), Some(b)) => {
                    let (ca, cb) = {
                        let level = &self.levels[&l];
                        (level.centers[a], level.centers[b])
                    };
                    // both connections are priced against the bought set after P
                    let before = self.bought.clone();
                    let (_, pa) = self.buy_path(ca, s)?;
                    let after_first = std::mem::replace(&mut self.bought, before);
                    let (_, pb) = self.buy_path(cb, t)?;
                    self.bought.extend(&after_first);
                    record.actual = record.actual + self.paths_cost(&pa, &pb);
                    for e in pa.iter().chain(&pb) {
                        if !bought.contains(e) {
                            bought.push(*e);
                        }
                    }
                    if self.levels.get_mut(&l).unwrap().add_edge(a, b) {
                        self.cycle_detected = true;
                    }
                }
            }
        }
        record.charged = record.actual.clone();
        record.bought_edges = bought;
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

    #[test]
    fn single_pair_adds_one_ball() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(8)).unwrap();
        let mut e = BermanCoulston::new(&g, ZeroCostOverlay::new(&g));
        assert_eq!(e.serve(&Demand::pair(0, 1)).unwrap().charged, q(8));
        let level = &e.levels()[&3];
        assert_eq!(level.centers, vec![0]);
        assert_eq!(level.iterations, 1);
        // the same pair again is free and touches no level
        assert_eq!(e.serve(&Demand::pair(0, 1)).unwrap().charged, q(0));
        assert_eq!(e.levels()[&3].iterations, 1);
    }

    #[test]
    fn zero_cost_pair_skips_bookkeeping() {
        let mut g = WeightedGraph::new(2);
        let id = g.add_edge(0, 1, q(5)).unwrap();
        let mut o = ZeroCostOverlay::new(&g);
        o.zero_edge(id);
        let mut e = BermanCoulston::new(&g, o);
        assert_eq!(e.serve(&Demand::pair(1, 0)).unwrap().charged, q(0));
        assert!(e.levels().is_empty());
    }

    #[test]
    fn both_balls_hit_adds_meta_edge() {
        let mut g = WeightedGraph::new(6);
        g.add_edge(0, 1, q(8)).unwrap();
        g.add_edge(2, 3, q(8)).unwrap();
        g.add_edge(4, 0, q(1)).unwrap();
        g.add_edge(5, 2, q(1)).unwrap();
        g.add_edge(4, 5, q(10)).unwrap();
        g.add_edge(0, 2, q(20)).unwrap();
        let mut e = BermanCoulston::new(&g, ZeroCostOverlay::new(&g));
        e.serve(&Demand::pair(0, 1)).unwrap();
        e.serve(&Demand::pair(2, 3)).unwrap();
        let r = e.serve(&Demand::pair(4, 5)).unwrap();
        assert_eq!(r.charged, q(12));
        assert_eq!(r.bought_edges, vec![4, 2, 3]);
        let level = &e.levels()[&3];
        assert_eq!(level.centers, vec![0, 2]);
        assert_eq!(level.meta_edges, vec![(0, 1)]);
        assert_eq!(level.iterations, 3);
        assert!(!e.cycle_detected());
    }
}
