//! Prediction error as a pair `(delta, D)`: `delta` counts unmatched
//! requests and predictions, `D` is the cost of matching the rest.

use crate::error::{input, Result};
use crate::graph::{Metric, Priority, VertexId};
use crate::matching::matching_ladder;
use crate::request::{Demand, PredictionSet, Request};
use crate::scalar::{Extended, Scalar};
use serde::Serialize;
use std::collections::HashMap;

/// One feasible error pair with its witness matching.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutlierError<T> {
    pub delta: usize,
    pub matching_cost: T,
    /// Indices into the request list, ascending.
    pub matched_requests: Vec<usize>,
    /// Indices into the prediction list, ascending.
    pub matched_predictions: Vec<usize>,
    /// `(request index, prediction index)`, sorted by request.
    pub matching: Vec<(usize, usize)>,
}

impl<T> OutlierError<T> {
    pub fn matched(&self) -> usize {
        self.matching.len()
    }
}

/// Non-dominated error pairs, sorted by `delta` ascending (so `D` strictly
/// decreasing).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParetoFrontier<T> {
    pub points: Vec<OutlierError<T>>,
}

impl<T: Scalar> ParetoFrontier<T> {
    /// `(delta, D, k)` triples.
    pub fn triples(&self) -> Vec<(usize, T, usize)> {
        self.points.iter().map(|p| (p.delta, p.matching_cost.clone(), p.matched())).collect()
    }

    pub fn contains(&self, delta: usize, d: &T) -> bool {
        self.points.iter().any(|p| p.delta == delta && p.matching_cost == *d)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,D,k\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.delta, p.matching_cost, p.matched()));
        }
        out
    }
}

/// Single-source distance rows, cached per (priority floor, source).
pub(crate) struct DistanceCache<'m, 'g, T> {
    metric: &'m Metric<'g, T>,
    rows: HashMap<(Priority, VertexId), Vec<Extended<T>>>,
}

impl<'m, 'g, T: Scalar> DistanceCache<'m, 'g, T> {
    pub(crate) fn new(metric: &'m Metric<'g, T>) -> Self {
        DistanceCache { metric, rows: HashMap::new() }
    }

    pub(crate) fn get(&mut self, floor: Priority, u: VertexId, v: VertexId) -> Result<Extended<T>> {
        if let Some(row) = self.rows.get(&(floor, u)) {
            return Ok(row[v].clone());
        }
        let m = if floor == self.metric.floor() {
            *self.metric
        } else {
            self.metric.with_floor(floor)
        };
        let row = m.distances_from(u)?;
        let d = row[v].clone();
        self.rows.insert((floor, u), row);
        Ok(d)
    }
}

fn cached_pair_cost<T: Scalar>(
    a: &Demand,
    b: &Demand,
    cache: &mut DistanceCache<'_, '_, T>,
) -> Result<Extended<T>> {
    let base = cache.metric.floor();
    match (a, b) {
        (Demand::Terminal(x), Demand::Terminal(y)) | (Demand::Client(x), Demand::Client(y)) => {
            cache.get(base, *x, *y)
        }
        (
            Demand::TerminalPair { s: s1, t: t1, priority: p1 },
            Demand::TerminalPair { s: s2, t: t2, priority: p2 },
        ) => {
            if p1 != p2 {
                return Ok(Extended::Infinite);
            }
            let j = base.max(*p1);
            let straight = cache.get(j, *s1, *s2)?.add(&cache.get(j, *t1, *t2)?);
            let crossed = cache.get(j, *s1, *t2)?.add(&cache.get(j, *s2, *t1)?);
            Ok(straight.min(crossed))
        }
        _ => input(format!("cannot match {a} with {b}: different request kinds")),
    }
}

/// Cost of matching one request with one prediction.
pub fn pair_matching_cost<T: Scalar>(a: &Demand, b: &Demand, metric: &Metric<'_, T>) -> Result<Extended<T>> {
    cached_pair_cost(a, b, &mut DistanceCache::new(metric))
}

/// Rows are requests, columns are predictions.
pub fn cost_matrix<T: Scalar>(
    requests: &[Request],
    predictions: &PredictionSet,
    metric: &Metric<'_, T>,
) -> Result<Vec<Vec<Extended<T>>>> {
    let mut cache = DistanceCache::new(metric);
    let mut out = Vec::with_capacity(requests.len());
    for r in requests {
        let mut row = Vec::with_capacity(predictions.len());
        for p in &predictions.items {
            row.push(cached_pair_cost(&r.demand, p, &mut cache)?);
        }
        out.push(row);
    }
    Ok(out)
}

fn check_kinds(requests: &[Request], predictions: &PredictionSet) -> Result<()> {
    let mut kinds = requests.iter().map(|r| r.demand.kind()).chain(predictions.items.iter().map(|d| d.kind()));
    if let Some(first) = kinds.next() {
        if kinds.any(|k| k != first) {
            return input("requests and predictions mix demand kinds");
        }
    }
    Ok(())
}

/// Keeps size `k` when it is the largest size or strictly cheaper than
/// `k + 1`; returns points ordered by `delta` ascending.
pub fn frontier_from_ladder<T: Scalar>(
    n_requests: usize,
    n_predictions: usize,
    ladder: &[(T, Vec<(usize, usize)>)],
) -> ParetoFrontier<T> {
    let mut points = Vec::new();
    for k in (0..ladder.len()).rev() {
        let keep = k + 1 == ladder.len() || ladder[k].0 < ladder[k + 1].0;
        if !keep {
            continue;
        }
        let matching = ladder[k].1.clone();
        let mut matched_requests: Vec<usize> = matching.iter().map(|p| p.0).collect();
        let mut matched_predictions: Vec<usize> = matching.iter().map(|p| p.1).collect();
        matched_requests.sort_unstable();
        matched_predictions.sort_unstable();
        points.push(OutlierError {
            delta: n_requests + n_predictions - 2 * k,
            matching_cost: ladder[k].0.clone(),
            matched_requests,
            matched_predictions,
            matching,
        });
    }
    ParetoFrontier { points }
}

/// The full error frontier, measured in `metric` (callers pass the original
/// graph without overlay).
pub fn pareto_frontier<T: Scalar>(
    requests: &[Request],
    predictions: &PredictionSet,
    metric: &Metric<'_, T>,
) -> Result<ParetoFrontier<T>> {
    check_kinds(requests, predictions)?;
    let costs = cost_matrix(requests, predictions, metric)?;
    let ladder: Vec<(T, Vec<(usize, usize)>)> = if requests.is_empty() {
        vec![(T::zero(), Vec::new())]
    } else {
        matching_ladder(&costs)?.into_iter().map(|m| (m.cost, m.pairs)).collect()
    };
    Ok(frontier_from_ladder(requests.len(), predictions.len(), &ladder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::request::sequence;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn path(n: usize) -> WeightedGraph<Q> {
        let mut g = WeightedGraph::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i, q(1)).unwrap();
        }
        g
    }

    #[test]
    fn pair_costs() {
        let g = path(4);
        let m = g.metric();
        assert_eq!(pair_matching_cost(&Demand::Terminal(2), &Demand::Terminal(2), &m).unwrap(), Extended::Finite(q(0)));
        assert_eq!(pair_matching_cost(&Demand::pair(0, 3), &Demand::pair(3, 0), &m).unwrap(), Extended::Finite(q(0)));
        let a = Demand::TerminalPair { s: 0, t: 1, priority: 1 };
        let b = Demand::TerminalPair { s: 0, t: 1, priority: 2 };
        assert_eq!(pair_matching_cost(&a, &b, &m).unwrap(), Extended::Infinite);
        assert!(pair_matching_cost(&Demand::Terminal(0), &Demand::Client(0), &m).is_err());
    }

    #[test]
    fn perfect_and_empty_predictions() {
        let g = path(4);
        let r = sequence([Demand::Terminal(1), Demand::Terminal(3)]);
        let f = pareto_frontier(&r, &PredictionSet::from_requests(&r), &g.metric()).unwrap();
        assert_eq!(f.triples(), vec![(0, q(0), 2)]);
        let f = pareto_frontier(&r, &PredictionSet::default(), &g.metric()).unwrap();
        assert_eq!(f.triples(), vec![(2, q(0), 0)]);
    }

    #[test]
    fn two_by_two_frontier() {
        // points 0,1 are one apart and 5 apart from 2,3 respectively
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 2, q(1)).unwrap();
        g.add_edge(1, 3, q(1)).unwrap();
        g.add_edge(2, 3, q(3)).unwrap();
        let r = sequence([Demand::Terminal(0), Demand::Terminal(1)]);
        let p = PredictionSet::new(vec![Demand::Terminal(2), Demand::Terminal(3)]);
        let f = pareto_frontier(&r, &p, &g.metric()).unwrap();
        assert_eq!(f.triples(), vec![(0, q(2), 2), (2, q(1), 1), (4, q(0), 0)]);
        assert_eq!(f.to_csv(), "delta,D,k\n0,2,2\n2,1,1\n4,0,0\n");
        assert_eq!(f.points[1].matching, vec![(0, 0)]);
    }
}
