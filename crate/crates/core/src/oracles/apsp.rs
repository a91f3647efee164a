//! Floyd–Warshall with next-hop edges. Kept separate from the Dijkstra used
//! by the engines so the oracles check against an independent computation.

use crate::graph::{EdgeId, Priority, VertexId, WeightedGraph};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Debug)]
pub struct AllPairs<T> {
    pub dist: Vec<Vec<Extended<T>>>,
    next: Vec<Vec<Option<EdgeId>>>,
}

impl<T: Scalar> AllPairs<T> {
    /// Distances over edges of priority at least `floor`.
    pub fn new(graph: &WeightedGraph<T>, floor: Priority) -> Self {
        let n = graph.vertex_count();
        let mut dist = vec![vec![Extended::Infinite; n]; n];
        let mut next = vec![vec![None; n]; n];
        for (v, row) in dist.iter_mut().enumerate() {
            row[v] = Extended::zero();
        }
        for (id, e) in graph.edges().iter().enumerate() {
            if e.priority < floor {
                continue;
            }
            let c = Extended::Finite(e.cost.clone());
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if c < dist[a][b] {
                    dist[a][b] = c.clone();
                    next[a][b] = Some(id);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(dik) = dist[i][k].finite().cloned() else { continue };
                for j in 0..n {
                    let Some(dkj) = dist[k][j].finite() else { continue };
                    let cand = dik.clone() + dkj.clone();
                    if dist[i][j].finite().map_or(true, |d| cand < *d) {
                        dist[i][j] = Extended::Finite(cand);
                        next[i][j] = next[i][k];
                    }
                }
            }
        }
        AllPairs { dist, next }
    }

    pub fn d(&self, u: VertexId, v: VertexId) -> &Extended<T> {
        &self.dist[u][v]
    }

    /// Edge ids of a shortest `u`–`v` path, empty if `u == v` or unreachable.
    pub fn path(&self, graph: &WeightedGraph<T>, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut x = u;
        while x != v {
            assert!(out.len() <= graph.vertex_count(), "next-hop table has a cycle");
            let Some(e) = self.next[x][v] else { return Vec::new() };
            out.push(e);
            x = graph.edge(e).other(x);
        }
        out
    }
}
