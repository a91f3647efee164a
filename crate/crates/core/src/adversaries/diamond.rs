//! Recursive diamond graphs: `I_0` is one edge from the root, and `I_i`
//! replaces every edge of `I_{i-1}` by a diamond. The adversary asks for
//! the far end first, then level by level for the diamond midpoint the
//! algorithm has not reached.

use super::{play, Adversary, Player, Transcript};
use crate::engines::GreedyTree;
use crate::error::Result;
use crate::graph::{EdgeId, VertexId, WeightedGraph, ZeroCostOverlay};
use crate::oracles::exact_steiner_tree;
use crate::request::Demand;
use crate::scalar::{Extended, Scalar};
use std::collections::{HashMap, HashSet, VecDeque};

#[derive(Clone, Debug)]
pub struct DiamondInstance<T> {
    pub depth: u32,
    /// Unit edge costs.
    pub graph: WeightedGraph<T>,
    pub root: VertexId,
    pub far: VertexId,
    /// Far end of every arm; arms share only the root.
    pub arms: Vec<VertexId>,
    /// Midpoints of the diamond that replaced the edge `(u, w)`.
    pub midpoints: HashMap<(VertexId, VertexId), (VertexId, VertexId)>,
}

impl<T: Scalar> DiamondInstance<T> {
    pub fn new(depth: u32) -> Self {
        Self::with_arms(depth, 1)
    }

    /// `arms` copies of `I_depth` glued at the root.
    pub fn with_arms(depth: u32, arms: usize) -> Self {
        let mut graph = WeightedGraph::new(1);
        let mut midpoints = HashMap::new();
        let fars: Vec<VertexId> = (0..arms).map(|_| graph.add_vertex()).collect();
        for &f in &fars {
            split(&mut graph, &mut midpoints, 0, f, depth);
        }
        DiamondInstance { depth, graph, root: 0, far: fars[0], arms: fars, midpoints }
    }

    /// Requests per arm.
    pub fn request_count(&self) -> usize {
        1 << self.depth
    }
}

fn split<T: Scalar>(
    g: &mut WeightedGraph<T>,
    mid: &mut HashMap<(VertexId, VertexId), (VertexId, VertexId)>,
    u: VertexId,
    w: VertexId,
    depth: u32,
) {
    if depth == 0 {
        g.add_edge(u, w, T::one()).expect("fresh vertices");
        return;
    }
    let a = g.add_vertex();
    let b = g.add_vertex();
    mid.insert((u, w), (a, b));
    for (x, y) in [(u, a), (a, w), (u, b), (b, w)] {
        split(g, mid, x, y, depth - 1);
    }
}

pub struct DiamondAdversary<'a, T> {
    inst: &'a DiamondInstance<T>,
    far: VertexId,
    started: bool,
    level: u32,
    path: Vec<VertexId>,
    next_path: Vec<VertexId>,
    pending: VecDeque<(VertexId, VertexId)>,
}

impl<'a, T: Scalar> DiamondAdversary<'a, T> {
    pub fn new(inst: &'a DiamondInstance<T>) -> Self {
        Self::for_arm(inst, 0)
    }

    pub fn for_arm(inst: &'a DiamondInstance<T>, arm: usize) -> Self {
        DiamondAdversary {
            inst,
            far: inst.arms[arm],
            started: false,
            level: 0,
            path: vec![inst.root, inst.arms[arm]],
            next_path: Vec::new(),
            pending: VecDeque::new(),
        }
    }

    /// Root, requested points and far end in path order.
    pub fn path(&self) -> &[VertexId] {
        &self.path
    }
}

impl<T: Scalar> Adversary for DiamondAdversary<'_, T> {
    fn next(&mut self, edges: &[EdgeId], _: &[VertexId]) -> Option<Demand> {
        if !self.started {
            self.started = true;
            return Some(Demand::Terminal(self.far));
        }
        if self.pending.is_empty() {
            if self.level == self.inst.depth {
                return None;
            }
            self.level += 1;
            self.pending = self.path.windows(2).map(|w| (w[0], w[1])).collect();
            self.next_path = vec![self.inst.root];
        }
        let (u, w) = self.pending.pop_front().unwrap();
        let (a, b) = self.inst.midpoints[&(u, w)];
        let mut reached: HashSet<VertexId> = HashSet::from([self.inst.root]);
        // edges outside the diamond (padding) are ignored
        for &e in edges.iter().filter(|&&e| e < self.inst.graph.edge_count()) {
            let edge = self.inst.graph.edge(e);
            reached.insert(edge.u);
            reached.insert(edge.v);
        }
        let pick = if !reached.contains(&a) || reached.contains(&b) { a } else { b };
        self.next_path.extend([pick, w]);
        if self.pending.is_empty() {
            self.path = std::mem::take(&mut self.next_path);
        }
        Some(Demand::Terminal(pick))
    }
}

#[derive(Clone, Debug)]
pub struct DiamondRun<T> {
    pub depth: u32,
    pub transcript: Transcript<T>,
    pub alg: T,
    /// Cost of the final root-to-far path, which contains every request.
    pub opt: T,
    /// The path cost equals the root-to-far distance, so `opt` is optimal.
    pub opt_certified: bool,
    /// Dreyfus–Wagner optimum when the terminal count allows it.
    pub exact_opt: Option<T>,
}

impl<T: Scalar> DiamondRun<T> {
    pub fn ratio(&self) -> f64 {
        self.alg.as_f64() / self.opt.as_f64()
    }
}

/// Plays the diamond adversary against `player` on `inst`.
pub fn diamond_run<T: Scalar>(inst: &DiamondInstance<T>, player: &mut dyn Player<T>) -> Result<DiamondRun<T>> {
    let mut adv = DiamondAdversary::new(inst);
    let transcript = play(&mut adv, player)?;
    let path = adv.path().to_vec();
    let mut opt = T::zero();
    for w in path.windows(2) {
        let cheapest = inst
            .graph
            .neighbors(w[0])
            .iter()
            .filter(|(x, _)| *x == w[1])
            .map(|&(_, e)| inst.graph.edge(e).cost.clone())
            .fold(None, |m: Option<T>, c| Some(m.map_or(c.clone(), |m| T::min_of(m, c))));
        opt = opt + cheapest.expect("consecutive path points are adjacent");
    }
    let lower = inst.graph.metric().distance(inst.root, inst.far)?;
    let opt_certified = lower == Extended::Finite(opt.clone());
    let terminals: Vec<VertexId> = transcript.steps.iter().flat_map(|s| s.request.vertices()).collect();
    let exact_opt = if terminals.len() < 12 {
        Some(exact_steiner_tree(&inst.graph, &terminals, inst.root)?.cost)
    } else {
        None
    };
    Ok(DiamondRun { depth: inst.depth, alg: transcript.total(), transcript, opt, opt_certified, exact_opt })
}

/// Diamond adversary against the greedy online Steiner tree.
pub fn diamond_adversary<T: Scalar>(depth: u32) -> Result<DiamondRun<T>> {
    let inst = DiamondInstance::<T>::new(depth);
    let mut engine = GreedyTree::new(&inst.graph, inst.root, ZeroCostOverlay::new(&inst.graph))?;
    diamond_run(&inst, &mut engine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn structure_counts() {
        for i in 0..=4u32 {
            let inst = DiamondInstance::<Q>::new(i);
            assert_eq!(inst.graph.edge_count(), 4usize.pow(i));
            if i >= 1 {
                assert!(inst.graph.vertex_count() <= 4usize.pow(i));
            }
        }
    }

    #[test]
    fn depth_zero_ratio_one() {
        let run = diamond_adversary::<Q>(0).unwrap();
        assert_eq!(run.transcript.steps.len(), 1);
        assert_eq!(run.alg, run.opt);
    }

    #[test]
    fn requests_and_certificate() {
        for i in 1..=3u32 {
            let run = diamond_adversary::<Q>(i).unwrap();
            assert_eq!(run.transcript.steps.len(), 1 << i);
            assert!(run.opt_certified);
            assert_eq!(run.exact_opt.as_ref(), Some(&run.opt));
        }
    }

    #[test]
    fn greedy_ratio_on_first_diamond() {
        let run = diamond_adversary::<Q>(1).unwrap();
        // far end costs 2, the untouched midpoint 1 more; optimum 2
        assert_eq!(run.alg, Q::from_integer(3.into()));
        assert_eq!(run.opt, Q::from_integer(2.into()));
    }
}
