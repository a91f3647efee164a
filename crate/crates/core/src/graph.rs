//! Undirected weighted graphs, the zero-cost overlay, and shortest paths.

use crate::error::{input, Error, Result};
use crate::scalar::{Extended, Ordered, Scalar};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Priority = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: T,
    pub priority: Priority,
}

impl<T> Edge<T> {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected multigraph with nonnegative edge costs, edge priorities, and
/// optional per-vertex facility costs and capacities.
#[derive(Clone, Debug)]
pub struct WeightedGraph<T> {
    edges: Vec<Edge<T>>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    facility_costs: Option<Vec<Option<T>>>,
    capacities: Option<Vec<Option<u64>>>,
}

impl<T: Scalar> WeightedGraph<T> {
    pub fn new(vertex_count: usize) -> Self {
        WeightedGraph {
            edges: Vec::new(),
            adjacency: vec![Vec::new(); vertex_count],
            facility_costs: None,
            capacities: None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge<T> {
        &self.edges[e]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adjacency.push(Vec::new());
        if let Some(f) = &mut self.facility_costs {
            f.push(None);
        }
        if let Some(c) = &mut self.capacities {
            c.push(None);
        }
        self.adjacency.len() - 1
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, cost: T) -> Result<EdgeId> {
        self.add_edge_with_priority(u, v, cost, 1)
    }

    pub fn add_edge_with_priority(
        &mut self,
        u: VertexId,
        v: VertexId,
        cost: T,
        priority: Priority,
    ) -> Result<EdgeId> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return input(format!("self-loop at vertex {u}"));
        }
        if cost < T::zero() {
            return input(format!("negative cost on edge {u}-{v}"));
        }
        if priority == 0 {
            return input(format!("priority 0 on edge {u}-{v}; priorities start at 1"));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, cost, priority });
        self.adjacency[u].push((v, id));
        self.adjacency[v].push((u, id));
        Ok(id)
    }

    /// Facility cost at `v`; `None` means no facility can open there.
    pub fn facility_cost(&self, v: VertexId) -> Option<&T> {
        self.facility_costs.as_ref().and_then(|f| f[v].as_ref())
    }

    pub fn has_facility_data(&self) -> bool {
        self.facility_costs.is_some()
    }

    pub fn set_facility_cost(&mut self, v: VertexId, cost: Option<T>) -> Result<()> {
        self.check_vertex(v)?;
        if let Some(c) = &cost {
            if *c < T::zero() {
                return input(format!("negative facility cost at vertex {v}"));
            }
        }
        let n = self.vertex_count();
        self.facility_costs.get_or_insert_with(|| vec![None; n])[v] = cost;
        Ok(())
    }

    /// Vertices where a facility may open, ascending.
    pub fn facility_sites(&self) -> Vec<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| self.facility_cost(v).is_some())
            .collect()
    }

    pub fn capacity(&self, v: VertexId) -> Option<u64> {
        self.capacities.as_ref().and_then(|c| c[v])
    }

    pub fn has_capacity_data(&self) -> bool {
        self.capacities.is_some()
    }

    pub fn set_capacity(&mut self, v: VertexId, beta: u64) -> Result<()> {
        self.check_vertex(v)?;
        if beta == 0 {
            return input(format!("zero capacity at vertex {v}"));
        }
        let n = self.vertex_count();
        self.capacities.get_or_insert_with(|| vec![None; n])[v] = Some(beta);
        Ok(())
    }

    pub fn max_priority(&self) -> Priority {
        self.edges.iter().map(|e| e.priority).max().unwrap_or(1)
    }

    pub fn metric(&self) -> Metric<'_, T> {
        Metric::new(self)
    }

    /// Sum of the original costs of `edges`; repeated ids count once.
    pub fn edge_set_cost(&self, edges: &[EdgeId]) -> T {
        let mut seen = vec![false; self.edge_count()];
        let mut total = T::zero();
        for &e in edges {
            if !seen[e] {
                seen[e] = true;
                total = total + self.edges[e].cost.clone();
            }
        }
        total
    }

    /// Converts the cost type, e.g. exact rationals to floats.
    pub fn map_costs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> WeightedGraph<U> {
        WeightedGraph {
            edges: self
                .edges
                .iter()
                .map(|e| Edge { u: e.u, v: e.v, cost: f(&e.cost), priority: e.priority })
                .collect(),
            adjacency: self.adjacency.clone(),
            facility_costs: self
                .facility_costs
                .as_ref()
                .map(|fc| fc.iter().map(|c| c.as_ref().map(&f)).collect()),
            capacities: self.capacities.clone(),
        }
    }
}

/// Edges and facilities whose cost is treated as zero. Only grows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZeroCostOverlay {
    edges: Vec<bool>,
    facilities: Vec<bool>,
    edge_count: usize,
    facility_count: usize,
}

impl ZeroCostOverlay {
    pub fn new<T: Scalar>(graph: &WeightedGraph<T>) -> Self {
        ZeroCostOverlay {
            edges: vec![false; graph.edge_count()],
            facilities: vec![false; graph.vertex_count()],
            edge_count: 0,
            facility_count: 0,
        }
    }

    pub fn zero_edge(&mut self, e: EdgeId) {
        if e >= self.edges.len() {
            self.edges.resize(e + 1, false);
        }
        if !self.edges[e] {
            self.edges[e] = true;
            self.edge_count += 1;
        }
    }

    pub fn zero_facility(&mut self, v: VertexId) {
        if v >= self.facilities.len() {
            self.facilities.resize(v + 1, false);
        }
        if !self.facilities[v] {
            self.facilities[v] = true;
            self.facility_count += 1;
        }
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.get(e).copied().unwrap_or(false)
    }

    pub fn has_facility(&self, v: VertexId) -> bool {
        self.facilities.get(v).copied().unwrap_or(false)
    }

    pub fn zeroed_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().enumerate().filter(|(_, &z)| z).map(|(e, _)| e)
    }

    pub fn zeroed_facilities(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.facilities.iter().enumerate().filter(|(_, &z)| z).map(|(v, _)| v)
    }

    pub fn zeroed_edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn zeroed_facility_count(&self) -> usize {
        self.facility_count
    }

    pub fn extend(&mut self, other: &ZeroCostOverlay) {
        for e in other.zeroed_edges() {
            self.zero_edge(e);
        }
        for v in other.zeroed_facilities() {
            self.zero_facility(v);
        }
    }
}

/// Shortest-path view of a graph: an optional overlay and a priority floor
/// (edges of priority below the floor are absent).
#[derive(Debug)]
pub struct Metric<'a, T> {
    graph: &'a WeightedGraph<T>,
    overlay: Option<&'a ZeroCostOverlay>,
    floor: Priority,
}

impl<T> Clone for Metric<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Metric<'_, T> {}

/// Result of a single-pair query.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPath<T> {
    pub cost: Extended<T>,
    /// Edges from `u` to `v`, in order. Empty when `u == v` or unreachable.
    pub edges: Vec<EdgeId>,
}

/// Shortest-path tree from one or more sources.
#[derive(Clone, Debug)]
pub struct PathTree<T> {
    pub dist: Vec<Extended<T>>,
    pred: Vec<Option<EdgeId>>,
    origin: Vec<Option<VertexId>>,
}

impl<T: Scalar> PathTree<T> {
    /// Edges from the nearest source to `v`, source first.
    pub fn path_to<U: Scalar>(&self, graph: &WeightedGraph<U>, v: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut x = v;
        while let Some(e) = self.pred[x] {
            out.push(e);
            x = graph.edge(e).other(x);
        }
        out.reverse();
        out
    }

    /// The source whose tree contains `v`.
    pub fn origin(&self, v: VertexId) -> Option<VertexId> {
        self.origin[v]
    }
}

impl<'a, T: Scalar> Metric<'a, T> {
    pub fn new(graph: &'a WeightedGraph<T>) -> Self {
        Metric { graph, overlay: None, floor: 1 }
    }

    pub fn with_overlay(self, overlay: &'a ZeroCostOverlay) -> Self {
        Metric { overlay: Some(overlay), ..self }
    }

    pub fn with_floor(self, floor: Priority) -> Self {
        Metric { floor, ..self }
    }

    pub fn without_overlay(self) -> Self {
        Metric { overlay: None, ..self }
    }

    pub fn graph(&self) -> &'a WeightedGraph<T> {
        self.graph
    }

    pub fn overlay(&self) -> Option<&'a ZeroCostOverlay> {
        self.overlay
    }

    pub fn floor(&self) -> Priority {
        self.floor
    }

    pub fn edge_usable(&self, e: EdgeId) -> bool {
        self.graph.edge(e).priority >= self.floor
    }

    /// Cost of `e` under the overlay.
    pub fn edge_cost(&self, e: EdgeId) -> T {
        if self.overlay.is_some_and(|o| o.has_edge(e)) {
            T::zero()
        } else {
            self.graph.edge(e).cost.clone()
        }
    }

    /// Facility cost under the overlay; `None` if no facility can open at `v`.
    pub fn facility_cost(&self, v: VertexId) -> Option<T> {
        let f = self.graph.facility_cost(v)?;
        if self.overlay.is_some_and(|o| o.has_facility(v)) {
            Some(T::zero())
        } else {
            Some(f.clone())
        }
    }

    pub fn path_cost(&self, edges: &[EdgeId]) -> T {
        edges.iter().fold(T::zero(), |acc, &e| acc + self.edge_cost(e))
    }

    /// Dijkstra from a set of sources. Ties are broken towards the smaller
    /// vertex id, and predecessors only change on strict improvement.
    pub fn tree_from(&self, sources: &[VertexId]) -> Result<PathTree<T>> {
        let n = self.graph.vertex_count();
        let mut dist: Vec<Extended<T>> = vec![Extended::Infinite; n];
        let mut pred = vec![None; n];
        let mut origin = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            self.graph.check_vertex(s)?;
            if origin[s].is_none() {
                dist[s] = Extended::zero();
                origin[s] = Some(s);
                heap.push(Reverse((Ordered(T::zero()), s)));
            }
        }
        while let Some(Reverse((Ordered(d), x))) = heap.pop() {
            if done[x] {
                continue;
            }
            done[x] = true;
            for &(y, e) in self.graph.neighbors(x) {
                if done[y] || !self.edge_usable(e) {
                    continue;
                }
                let nd = d.clone() + self.edge_cost(e);
                let better = match &dist[y] {
                    Extended::Infinite => true,
                    Extended::Finite(old) => nd < *old,
                };
                if better {
                    dist[y] = Extended::Finite(nd.clone());
                    pred[y] = Some(e);
                    origin[y] = origin[x];
                    heap.push(Reverse((Ordered(nd), y)));
                }
            }
        }
        Ok(PathTree { dist, pred, origin })
    }

    pub fn distances_from(&self, u: VertexId) -> Result<Vec<Extended<T>>> {
        Ok(self.tree_from(&[u])?.dist)
    }

    pub fn shortest_path(&self, u: VertexId, v: VertexId) -> Result<ShortestPath<T>> {
        self.graph.check_vertex(v)?;
        let tree = self.tree_from(&[u])?;
        let cost = tree.dist[v].clone();
        let edges = if cost.is_finite() { tree.path_to(self.graph, v) } else { Vec::new() };
        Ok(ShortestPath { cost, edges })
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<Extended<T>> {
        self.graph.check_vertex(v)?;
        Ok(self.tree_from(&[u])?.dist[v].clone())
    }

    /// Open-ball test: `d(c1, c2) < r1 + r2`.
    pub fn ball_intersects(&self, c1: VertexId, r1: &T, c2: VertexId, r2: &T) -> Result<bool> {
        let d = self.distance(c1, c2)?;
        Ok(balls_meet(&d, r1, r2))
    }

    pub fn distance_matrix(&self, points: &[VertexId]) -> Result<Vec<Vec<Extended<T>>>> {
        let mut out = Vec::with_capacity(points.len());
        for &p in points {
            let row = self.distances_from(p)?;
            out.push(points.iter().map(|&q| row[q].clone()).collect());
        }
        Ok(out)
    }

    /// Errors unless every vertex in `targets` is reachable from `root`.
    pub fn check_reachable(&self, root: VertexId, targets: &[VertexId]) -> Result<()> {
        let dist = self.distances_from(root)?;
        for &t in targets {
            self.graph.check_vertex(t)?;
            if !dist[t].is_finite() {
                return Err(Error::Infeasible(format!(
                    "vertex {t} is disconnected from vertex {root} at priority floor {}",
                    self.floor
                )));
            }
        }
        Ok(())
    }
}

/// Disjoint sets over `0..n`; the smaller root wins a union.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }

    pub(crate) fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub(crate) fn from_edges<T: Scalar>(graph: &WeightedGraph<T>, edges: &[EdgeId]) -> Self {
        let mut uf = UnionFind::new(graph.vertex_count());
        for &e in edges {
            let edge = &graph.edges[e];
            uf.union(edge.u, edge.v);
        }
        uf
    }
}

/// Open-ball intersection given the center distance.
pub fn balls_meet<T: Scalar>(d: &Extended<T>, r1: &T, r2: &T) -> bool {
    match d {
        Extended::Finite(d) => *d < r1.clone() + r2.clone(),
        Extended::Infinite => false,
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

    fn cycle4() -> WeightedGraph<Q> {
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, q(1)).unwrap();
        g.add_edge(1, 2, q(1)).unwrap();
        g.add_edge(2, 3, q(1)).unwrap();
        g.add_edge(3, 0, q(10)).unwrap();
        g
    }

    #[test]
    fn single_edge_and_overlay() {
        let mut g = WeightedGraph::new(2);
        let e = g.add_edge(0, 1, q(5)).unwrap();
        let p = g.metric().shortest_path(0, 1).unwrap();
        assert_eq!(p, ShortestPath { cost: Extended::Finite(q(5)), edges: vec![e] });
        let mut o = ZeroCostOverlay::new(&g);
        o.zero_edge(e);
        let p = g.metric().with_overlay(&o).shortest_path(0, 1).unwrap();
        assert_eq!(p.cost, Extended::Finite(q(0)));
        assert_eq!(p.edges, vec![e]);
    }

    #[test]
    fn opposite_corners_of_cycle() {
        let g = cycle4();
        let p = g.metric().shortest_path(0, 2).unwrap();
        assert_eq!(p.cost, Extended::Finite(q(2)));
        assert_eq!(p.edges, vec![0, 1]);
        let p = g.metric().shortest_path(0, 3).unwrap();
        assert_eq!(p.cost, Extended::Finite(q(3)));
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g: WeightedGraph<Q> = WeightedGraph::new(2);
        assert!(g.add_edge(0, 0, q(1)).is_err());
        assert!(g.add_edge(0, 1, q(-1)).is_err());
        assert!(g.add_edge_with_priority(0, 1, q(1), 0).is_err());
        assert!(matches!(g.metric().distance(0, 7), Err(Error::UnknownVertex(7))));
    }

    #[test]
    fn ball_boundary_cases() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(3)).unwrap();
        let m = g.metric();
        assert!(!m.ball_intersects(0, &q(1), 1, &q(2)).unwrap());
        assert!(!m.ball_intersects(2, &q(0), 2, &q(0)).unwrap());
        assert!(!m.ball_intersects(0, &q(100), 2, &q(100)).unwrap());
        let mut p = WeightedGraph::new(3);
        p.add_edge(0, 1, q(2)).unwrap();
        p.add_edge(1, 2, q(2)).unwrap();
        assert!(p.metric().ball_intersects(0, &q(3), 2, &q(2)).unwrap());
    }

    #[test]
    fn matrix_examples() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(1)).unwrap();
        g.add_edge(1, 2, q(2)).unwrap();
        g.add_edge(0, 2, q(4)).unwrap();
        let m = g.metric().distance_matrix(&[0, 1, 2]).unwrap();
        let f = |x: i64| Extended::Finite(q(x));
        assert_eq!(m[0], vec![f(0), f(1), f(3)]);
        assert_eq!(m[2][0], f(3));
        assert_eq!(g.metric().distance_matrix(&[1]).unwrap(), vec![vec![f(0)]]);
    }

    #[test]
    fn priority_floor_disconnects() {
        let mut g = WeightedGraph::new(3);
        g.add_edge_with_priority(0, 1, q(1), 1).unwrap();
        g.add_edge_with_priority(1, 2, q(1), 2).unwrap();
        g.add_edge_with_priority(0, 2, q(5), 2).unwrap();
        assert_eq!(g.metric().distance(0, 2).unwrap(), Extended::Finite(q(2)));
        assert_eq!(g.metric().with_floor(2).distance(0, 2).unwrap(), Extended::Finite(q(5)));
        assert_eq!(g.metric().with_floor(3).distance(0, 2).unwrap(), Extended::Infinite);
        assert!(g.metric().with_floor(3).check_reachable(0, &[2]).is_err());
    }
}
