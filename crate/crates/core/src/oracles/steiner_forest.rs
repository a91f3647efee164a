//! Exact Steiner forest: every edge subset is tried, pairs are checked for
//! connectivity at their own priority floor.

use super::steiner_tree::DreyfusWagner;
use super::{OracleBudget, TreeSolution};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Priority, VertexId, WeightedGraph};
use crate::scalar::{Extended, Scalar};

/// `(s, t, priority)`
pub type PairSpec = (VertexId, VertexId, Priority);

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Cheapest edge subset for every exact set of satisfied pairs.
pub struct ForestTable<T> {
    pub pairs: Vec<PairSpec>,
    /// Indexed by satisfied-pair mask: `(cost, edge mask)`.
    pub best: Vec<Option<(T, u32)>>,
}

impl<T: Scalar> ForestTable<T> {
    pub fn new(graph: &WeightedGraph<T>, pairs: &[PairSpec]) -> Result<Self> {
        let budget = OracleBudget::DEFAULT;
        let m = graph.edge_count();
        if m > budget.max_edges {
            return Err(Error::OverBudget { what: "edges", limit: budget.max_edges, actual: m });
        }
        if pairs.len() > budget.max_terminals {
            return Err(Error::OverBudget { what: "pairs", limit: budget.max_terminals, actual: pairs.len() });
        }
        for &(s, t, _) in pairs {
            graph.check_vertex(s)?;
            graph.check_vertex(t)?;
        }
        let mut floors: Vec<Priority> = pairs.iter().map(|p| p.2).collect();
        floors.sort_unstable();
        floors.dedup();
        let n = graph.vertex_count();
        let mut best: Vec<Option<(T, u32)>> = vec![None; 1 << pairs.len()];
        let mut cost = T::zero();
        let mut edge_mask = 0u32;
        for step in 0u64..(1u64 << m) {
            if step > 0 {
                let bit = step.trailing_zeros() as usize;
                edge_mask ^= 1 << bit;
                let c = graph.edge(bit).cost.clone();
                cost = if edge_mask & (1 << bit) != 0 { cost + c } else { cost - c };
            }
            let mut sat = 0usize;
            for &j in &floors {
                let mut dsu = Dsu::new(n);
                for e in 0..m {
                    if edge_mask & (1 << e) != 0 && graph.edge(e).priority >= j {
                        dsu.union(graph.edge(e).u, graph.edge(e).v);
                    }
                }
                for (i, &(s, t, p)) in pairs.iter().enumerate() {
                    if p == j && dsu.find(s) == dsu.find(t) {
                        sat |= 1 << i;
                    }
                }
            }
            let better = match &best[sat] {
                None => true,
                Some((c, em)) => cost < *c || (cost == *c && edge_mask < *em),
            };
            if better {
                best[sat] = Some((cost.clone(), edge_mask));
            }
        }
        Ok(ForestTable { pairs: pairs.to_vec(), best })
    }

    pub fn edges_of(edge_mask: u32) -> Vec<EdgeId> {
        (0..32).filter(|e| edge_mask & (1 << e) != 0).collect()
    }

    /// Cheapest subset satisfying at least the pairs in `required`.
    pub fn cheapest_covering(&self, required: usize) -> Option<(T, u32)> {
        let mut out: Option<(T, u32)> = None;
        for (sat, entry) in self.best.iter().enumerate() {
            if sat & required != required {
                continue;
            }
            if let Some((c, em)) = entry {
                if out.as_ref().map_or(true, |(bc, bem)| *c < *bc || (*c == *bc && *em < *bem)) {
                    out = Some((c.clone(), *em));
                }
            }
        }
        out
    }
}

/// Minimum-cost edge set connecting every pair, by subset enumeration.
pub fn exact_steiner_forest<T: Scalar>(graph: &WeightedGraph<T>, pairs: &[PairSpec]) -> Result<TreeSolution<T>> {
    let table = ForestTable::new(graph, pairs)?;
    let full = (1usize << pairs.len()) - 1;
    match table.cheapest_covering(full) {
        Some((cost, em)) => Ok(TreeSolution { cost, edges: ForestTable::<T>::edges_of(em) }),
        None => Err(Error::Infeasible("some pair cannot be connected".into())),
    }
}

/// Steiner forest cost via optimal trees over partitions of the pairs.
/// Independent of the edge count; all pairs use the full graph.
pub fn exact_steiner_forest_by_partition<T: Scalar>(
    graph: &WeightedGraph<T>,
    pairs: &[(VertexId, VertexId)],
) -> Result<Extended<T>> {
    if pairs.len() > 6 {
        return Err(Error::OverBudget { what: "pairs for partition oracle", limit: 6, actual: pairs.len() });
    }
    let mut points: Vec<VertexId> = Vec::new();
    let index = |v: VertexId, points: &mut Vec<VertexId>| match points.iter().position(|&p| p == v) {
        Some(i) => i,
        None => {
            points.push(v);
            points.len() - 1
        }
    };
    let ends: Vec<(usize, usize)> =
        pairs.iter().map(|&(s, t)| (index(s, &mut points), index(t, &mut points))).collect();
    let dw = DreyfusWagner::new(graph, 1, &points)?;
    let k = pairs.len();
    let point_mask = |pm: usize| -> usize {
        (0..k).filter(|i| pm & (1 << i) != 0).fold(0, |acc, i| acc | (1 << ends[i].0) | (1 << ends[i].1))
    };
    let mut f: Vec<Extended<T>> = vec![Extended::Infinite; 1 << k];
    f[0] = Extended::zero();
    for mask in 1usize..(1 << k) {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let block = sub | low;
            let cand = dw.cost(point_mask(block)).add(&f[mask ^ block]);
            if cand < f[mask] {
                f[mask] = cand;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    Ok(f[(1 << k) - 1].clone())
}
