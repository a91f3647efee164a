//! Online metric matching on a unit star with `k + 1` spokes: blue points
//! on `k` leaves, the first red point on the empty leaf, and every further
//! red point on the blue point the algorithm matched last.

use crate::error::{input, Result};
use crate::error_model::{pareto_frontier, ParetoFrontier};
use crate::graph::{Metric, VertexId, WeightedGraph};
use crate::matching::matching_ladder;
use crate::request::{sequence, Demand, PredictionSet};
use crate::scalar::{Extended, Scalar};

pub trait OnlineMatcher<T: Scalar> {
    /// Index into `blues` of the free blue point to match `red` with.
    fn pick(&mut self, red: VertexId, blues: &[VertexId], free: &[bool], metric: &Metric<'_, T>) -> Result<usize>;
}

/// Nearest free blue point, lowest index on ties.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyMatcher;

impl<T: Scalar> OnlineMatcher<T> for GreedyMatcher {
    fn pick(&mut self, red: VertexId, blues: &[VertexId], free: &[bool], metric: &Metric<'_, T>) -> Result<usize> {
        let dist = metric.distances_from(red)?;
        let mut best: Option<usize> = None;
        for (i, &b) in blues.iter().enumerate() {
            if free[i] && best.map_or(true, |j| dist[b] < dist[blues[j]]) {
                best = Some(i);
            }
        }
        best.ok_or_else(|| crate::error::Error::Infeasible("no free blue point".into()))
    }
}

#[derive(Clone, Debug)]
pub struct MatchingLbRun<T> {
    pub k: usize,
    pub graph: WeightedGraph<T>,
    pub blues: Vec<VertexId>,
    pub reds: Vec<VertexId>,
    /// Blue index matched to each red point.
    pub assignment: Vec<usize>,
    pub alg: T,
    /// Offline optimum by min-cost perfect matching.
    pub opt: T,
    /// Error of predicting one red point on every blue point.
    pub frontier: ParetoFrontier<T>,
}

pub fn matching_lb_run<T: Scalar>(k: usize, matcher: &mut dyn OnlineMatcher<T>) -> Result<MatchingLbRun<T>> {
    if k < 2 {
        return input("matching lower bound needs k >= 2");
    }
    let mut graph = WeightedGraph::new(k + 2);
    for leaf in 1..=k + 1 {
        graph.add_edge(0, leaf, T::one())?;
    }
    let blues: Vec<VertexId> = (1..=k).collect();
    let metric = graph.metric();
    let mut free = vec![true; k];
    let mut reds = Vec::with_capacity(k);
    let mut assignment = Vec::with_capacity(k);
    let mut alg = T::zero();
    let mut red = k + 1;
    for _ in 0..k {
        let i = matcher.pick(red, &blues, &free, &metric)?;
        if !free[i] {
            return input(format!("matcher picked taken blue point {i}"));
        }
        free[i] = false;
        match metric.distance(red, blues[i])? {
            Extended::Finite(d) => alg = alg + d,
            Extended::Infinite => unreachable!("star is connected"),
        }
        reds.push(red);
        assignment.push(i);
        red = blues[i];
    }
    // the last red point would land on a taken blue point; k reds in total
    let costs: Vec<Vec<Extended<T>>> =
        reds.iter().map(|&r| blues.iter().map(|&b| metric.distance(r, b)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let opt = matching_ladder(&costs)?[k].cost.clone();
    let requests = sequence(reds.iter().map(|&r| Demand::Terminal(r)));
    let predictions = PredictionSet::new(blues.iter().map(|&b| Demand::Terminal(b)).collect());
    let frontier = pareto_frontier(&requests, &predictions, &metric)?;
    Ok(MatchingLbRun { k, blues, reds, assignment, alg, opt, frontier, graph })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn two_spokes() {
        let run = matching_lb_run::<Q>(2, &mut GreedyMatcher).unwrap();
        assert_eq!(run.alg, Q::from_integer(4.into()));
        assert_eq!(run.opt, Q::from_integer(2.into()));
        assert!(run.frontier.contains(2, &Q::from_integer(0.into())));
    }

    #[test]
    fn opt_is_two() {
        for k in [3, 5, 8] {
            let run = matching_lb_run::<Q>(k, &mut GreedyMatcher).unwrap();
            assert_eq!(run.alg, Q::from_integer((2 * k as i64).into()));
            assert_eq!(run.opt, Q::from_integer(2.into()));
        }
    }
}
