//! Complete binary tree with geometrically shrinking edge weights. Phase
//! `i` puts `factor^(i-1)` requests on a node of depth `i - 1`, always
//! stepping into a child subtree without an open facility.

use super::{play, Adversary, Transcript};
use crate::engines::{Fotakis, OnlineEngine};
use crate::error::{input, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph, ZeroCostOverlay};
use crate::oracles::exact_facility_location;
use crate::scalar::Scalar;
use crate::request::Demand;
use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct FotakisTree<T> {
    pub graph: WeightedGraph<T>,
    pub height: u32,
    pub factor: u64,
    /// Colocated copies of each tree node (heap order), the node first.
    pub copies: Vec<Vec<VertexId>>,
    /// Tree node of each vertex.
    pub node_of: Vec<usize>,
}

fn depth_of(node: usize) -> u32 {
    (usize::BITS - 1) - (node + 1).leading_zeros()
}

impl<T: Scalar> FotakisTree<T> {
    /// Edges into depth `d` weigh `f / factor^d`; a node at depth `b` has
    /// `copies_base^b` colocated copies. Every vertex may open a facility
    /// at cost `f`, except that non-root vertices get `f - discount`.
    pub fn new(height: u32, factor: u64, copies_base: u64, f: T, discount: T) -> Result<Self> {
        if factor < 2 {
            return input("tree factor must be at least 2");
        }
        let nodes = (1usize << (height + 1)) - 1;
        let mut graph = WeightedGraph::new(nodes);
        let mut node_of: Vec<usize> = (0..nodes).collect();
        for k in 1..nodes {
            let d = depth_of(k);
            let w = f.clone() * T::from_ratio(1, factor.pow(d));
            graph.add_edge((k - 1) / 2, k, w)?;
        }
        let mut copies = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let mut list = vec![k];
            for _ in 1..copies_base.pow(depth_of(k)) {
                let c = graph.add_vertex();
                graph.add_edge(k, c, T::zero())?;
                node_of.push(k);
                list.push(c);
            }
            copies.push(list);
        }
        let reduced = f.clone() - discount;
        for v in 0..graph.vertex_count() {
            let cost = if node_of[v] == 0 { f.clone() } else { reduced.clone() };
            graph.set_facility_cost(v, Some(cost))?;
        }
        Ok(FotakisTree { graph, height, factor, copies, node_of })
    }

    /// Is tree node `x` inside the subtree of `node`?
    pub fn in_subtree(&self, node: usize, mut x: usize) -> bool {
        loop {
            if x == node {
                return true;
            }
            if x == 0 {
                return false;
            }
            x = (x - 1) / 2;
        }
    }

    /// Requests of phase `i` (1-based): `factor^(i-1)`.
    pub fn phase_size(&self, phase: u32) -> usize {
        self.factor.pow(phase - 1) as usize
    }
}

pub struct FotakisLbAdversary<'a, T> {
    tree: &'a FotakisTree<T>,
    phase: u32,
    node: usize,
    queue: VecDeque<VertexId>,
    /// `(tree node, requests)` per phase so far.
    pub phases: Vec<(usize, usize)>,
}

impl<'a, T: Scalar> FotakisLbAdversary<'a, T> {
    pub fn new(tree: &'a FotakisTree<T>) -> Self {
        FotakisLbAdversary { tree, phase: 0, node: 0, queue: VecDeque::new(), phases: Vec::new() }
    }
}

impl<T: Scalar> Adversary for FotakisLbAdversary<'_, T> {
    fn next(&mut self, _: &[EdgeId], facilities: &[VertexId]) -> Option<Demand> {
        if self.queue.is_empty() {
            if self.phase == self.tree.height + 1 {
                return None;
            }
            self.phase += 1;
            if self.phase > 1 {
                let children = [2 * self.node + 1, 2 * self.node + 2];
                let free = |c: usize| !facilities
                    .iter()
                    .filter_map(|&f| self.tree.node_of.get(f))
                    .any(|&x| self.tree.in_subtree(c, x));
                self.node = children.into_iter().find(|&c| free(c)).unwrap_or(children[0]);
            }
            let copies = &self.tree.copies[self.node];
            let each = (self.tree.phase_size(self.phase) / copies.len()).max(1);
            self.queue = copies.iter().flat_map(|&c| std::iter::repeat(c).take(each)).collect();
            self.phases.push((self.node, self.queue.len()));
        }
        self.queue.pop_front().map(Demand::Client)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LbPhase {
    pub phase: usize,
    pub node: VertexId,
    pub first_step: usize,
    pub requests: usize,
    /// `(step, site)` for every facility opened during the phase.
    pub openings: Vec<(usize, VertexId)>,
}

#[derive(Clone, Debug)]
pub struct FotakisLbRun<T> {
    pub m: u32,
    pub transcript: Transcript<T>,
    pub phases: Vec<LbPhase>,
    pub actual_total: T,
    pub alpha_total: T,
    /// Last request of each phase.
    pub subset: Vec<usize>,
    pub subset_actual: T,
    pub subset_alpha: T,
    pub potential_violations: usize,
    /// Exact optimum over facilities on the requested root-to-leaf path.
    pub opt: T,
    /// Exact optimum over all sites when the tree is within the oracle
    /// budget; equals `opt`.
    pub opt_full: Option<T>,
}

impl<T: Scalar> FotakisLbRun<T> {
    /// Exactly one facility per phase, at the phase's node, on its last
    /// request.
    pub fn facility_per_phase(&self) -> bool {
        self.phases
            .iter()
            .all(|p| p.openings == vec![(p.first_step + p.requests - 1, p.node)])
    }
}

/// Tree of height `m` and factor `m` with unit facility cost and the
/// tie-breaking discount `1 / (2 m^m)`.
pub fn fotakis_lb_tree<T: Scalar>(m: u32) -> Result<FotakisTree<T>> {
    if m < 2 {
        return input("m must be at least 2");
    }
    let mm = (m as u64).pow(m);
    FotakisTree::new(m, m as u64, 1, T::one(), T::from_ratio(1, 2 * mm))
}

/// Plays `m + 1` phases on a tree of height `m` with factor `m` against the
/// Fotakis engine. Ties between potential and opening cost are broken by
/// a discount of `1 / (2 m^m)` on every non-root facility.
pub fn fotakis_lb_run<T: Scalar>(m: u32) -> Result<FotakisLbRun<T>> {
    let tree = fotakis_lb_tree::<T>(m)?;
    let mut engine = Fotakis::new(&tree.graph, ZeroCostOverlay::new(&tree.graph))?;
    let mut adv = FotakisLbAdversary::new(&tree);
    let transcript = play(&mut adv, &mut engine)?;
    let log = engine.log();
    let mut phases = Vec::new();
    let mut start = 0;
    for (i, &(node, requests)) in adv.phases.iter().enumerate() {
        let openings = (start..start + requests)
            .flat_map(|s| log[s].opened_facilities.iter().map(move |&f| (s, f)))
            .collect();
        phases.push(LbPhase { phase: i + 1, node, first_step: start, requests, openings });
        start += requests;
    }
    let subset: Vec<usize> = phases.iter().map(|p| p.first_step + p.requests - 1).collect();
    let sum = |idx: &mut dyn Iterator<Item = usize>, pick: &dyn Fn(usize) -> T| idx.fold(T::zero(), |a, i| a + pick(i));
    let actual = |i: usize| log[i].actual.clone();
    let alpha = |i: usize| log[i].charged.clone();
    let clients: Vec<VertexId> = transcript.steps.iter().flat_map(|s| s.request.vertices()).collect();
    // Moving a facility off the path to its nearest path node shortens
    // every connection by at least one edge, which outweighs the discount.
    let mut on_path = tree.graph.clone();
    for v in 0..on_path.vertex_count() {
        if !phases.iter().any(|p| p.node == tree.node_of[v]) {
            on_path.set_facility_cost(v, None)?;
        }
    }
    let opt = exact_facility_location(&on_path, &clients)?.cost;
    let opt_full = if tree.graph.facility_sites().len() <= crate::oracles::OracleBudget::DEFAULT.max_facilities {
        Some(exact_facility_location(&tree.graph, &clients)?.cost)
    } else {
        None
    };
    Ok(FotakisLbRun {
        m,
        actual_total: sum(&mut (0..log.len()), &actual),
        alpha_total: sum(&mut (0..log.len()), &alpha),
        subset_actual: sum(&mut subset.iter().copied(), &actual),
        subset_alpha: sum(&mut subset.iter().copied(), &alpha),
        potential_violations: engine.potential_violations(),
        transcript,
        phases,
        subset,
        opt,
        opt_full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn tree_shape() {
        let t = FotakisTree::<Q>::new(2, 2, 2, Q::from_integer(1.into()), Q::from_integer(0.into())).unwrap();
        // 1 + 2·2 + 4·4 vertices
        assert_eq!(t.graph.vertex_count(), 21);
        assert!(t.in_subtree(1, 4));
        assert!(!t.in_subtree(2, 4));
        assert_eq!(depth_of(0), 0);
        assert_eq!(depth_of(6), 2);
    }

    #[test]
    fn one_facility_per_phase() {
        for m in 2..=3 {
            let run = fotakis_lb_run::<Q>(m).unwrap();
            assert_eq!(run.phases.len(), m as usize + 1);
            assert!(run.facility_per_phase(), "{:?}", run.phases);
            assert!(run.alpha_total >= run.actual_total);
            assert_eq!(run.potential_violations, 0);
            assert_eq!(run.opt_full.as_ref(), Some(&run.opt));
        }
    }
}
