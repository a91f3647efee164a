//! Dreyfus–Wagner dynamic program over subsets of a point set.

use super::apsp::AllPairs;
use super::{OracleBudget, TreeSolution};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Priority, VertexId, WeightedGraph};
use crate::scalar::{Extended, Scalar};

/// Optimal Steiner trees for every subset of `points`, from one table.
pub struct DreyfusWagner<'g, T> {
    graph: &'g WeightedGraph<T>,
    apsp: AllPairs<T>,
    points: Vec<VertexId>,
    dp: Vec<Vec<Extended<T>>>,
    via: Vec<Vec<usize>>,
    split: Vec<Vec<usize>>,
}

impl<'g, T: Scalar> DreyfusWagner<'g, T> {
    /// `points` must be distinct; at most `max_terminals + 1` of them.
    pub fn new(graph: &'g WeightedGraph<T>, floor: Priority, points: &[VertexId]) -> Result<Self> {
        let limit = OracleBudget::DEFAULT.max_terminals + 1;
        if points.len() > limit {
            return Err(Error::OverBudget { what: "Steiner points", limit, actual: points.len() });
        }
        for &p in points {
            graph.check_vertex(p)?;
        }
        let apsp = AllPairs::new(graph, floor);
        let n = graph.vertex_count();
        let k = points.len();
        let full = 1usize << k;
        let mut dp = vec![Vec::new(); full];
        let mut via = vec![Vec::new(); full];
        let mut split = vec![Vec::new(); full];
        for mask in 1..full {
            if mask.count_ones() == 1 {
                let i = mask.trailing_zeros() as usize;
                dp[mask] = (0..n).map(|v| apsp.d(points[i], v).clone()).collect();
                continue;
            }
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut g: Vec<Extended<T>> = vec![Extended::Infinite; n];
            let mut g_split = vec![0usize; n];
            // submasks A of `mask` containing `low`, A != mask
            let mut sub = (rest.wrapping_sub(1)) & rest;
            loop {
                let a = sub | low;
                let b = mask ^ a;
                if b != 0 {
                    for u in 0..n {
                        let cand = dp[a][u].add(&dp[b][u]);
                        if cand < g[u] {
                            g[u] = cand;
                            g_split[u] = a;
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            let mut row = vec![Extended::Infinite; n];
            let mut row_via = vec![0usize; n];
            for u in 0..n {
                let Some(gu) = g[u].finite() else { continue };
                for v in 0..n {
                    let cand = apsp.d(u, v).add_finite(gu);
                    if cand < row[v] {
                        row[v] = cand;
                        row_via[v] = u;
                    }
                }
            }
            dp[mask] = row;
            via[mask] = row_via;
            split[mask] = g_split;
        }
        Ok(DreyfusWagner { graph, apsp, points: points.to_vec(), dp, via, split })
    }

    pub fn points(&self) -> &[VertexId] {
        &self.points
    }

    /// Cost of an optimal tree spanning the points in `mask`.
    pub fn cost(&self, mask: usize) -> Extended<T> {
        if mask == 0 {
            return Extended::zero();
        }
        let i = mask.trailing_zeros() as usize;
        self.dp[mask][self.points[i]].clone()
    }

    /// Edge set of an optimal tree for `mask`.
    pub fn edges(&self, mask: usize) -> Vec<EdgeId> {
        let mut out = Vec::new();
        if mask != 0 {
            let i = mask.trailing_zeros() as usize;
            if self.dp[mask][self.points[i]].is_finite() {
                self.build(mask, self.points[i], &mut out);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn build(&self, mask: usize, v: VertexId, out: &mut Vec<EdgeId>) {
        if mask.count_ones() == 1 {
            let i = mask.trailing_zeros() as usize;
            out.extend(self.apsp.path(self.graph, self.points[i], v));
            return;
        }
        let u = self.via[mask][v];
        out.extend(self.apsp.path(self.graph, u, v));
        let a = self.split[mask][u];
        self.build(a, u, out);
        self.build(mask ^ a, u, out);
    }

    pub fn distances(&self) -> &AllPairs<T> {
        &self.apsp
    }
}

/// Minimum-cost tree connecting `root` and all `terminals`.
pub fn exact_steiner_tree<T: Scalar>(
    graph: &WeightedGraph<T>,
    terminals: &[VertexId],
    root: VertexId,
) -> Result<TreeSolution<T>> {
    let mut points = vec![root];
    for &t in terminals {
        if !points.contains(&t) {
            points.push(t);
        }
    }
    let dw = DreyfusWagner::new(graph, 1, &points)?;
    let full = (1usize << points.len()) - 1;
    match dw.cost(full) {
        Extended::Infinite => Err(Error::Infeasible("terminals are not connected to the root".into())),
        Extended::Finite(cost) => {
            let edges = dw.edges(full);
            debug_assert!(graph.edge_set_cost(&edges) == cost);
            Ok(TreeSolution { cost, edges })
        }
    }
}
