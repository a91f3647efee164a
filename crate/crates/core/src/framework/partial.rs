//! The bi-criteria subroutine: a solution failing at most `2·gamma·u`
//! predictions at cost at most `3·gamma` times the best solution failing
//! at most `u`, built from prize-collecting calls at penalties `2^i`.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::prize_collecting::{PcSolution, PenaltyInstance, PrizeCollectingSolver};
use crate::request::DemandKind;
use crate::scalar::{Extended, Scalar};
use serde::Serialize;
use std::collections::HashMap;

/// How far past the upper scan bound to keep looking before giving up on
/// an approximate solver.
const EXTRA_EXPONENTS: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Empty,
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialResult<T> {
    pub u: usize,
    pub solution: PcSolution<T>,
    pub branch: Branch,
    /// `i` of the scan; `None` for the empty branch.
    pub exponent: Option<i32>,
}

impl<T: Scalar> PartialResult<T> {
    pub fn cost(&self) -> &T {
        &self.solution.element_cost
    }

    pub fn unsatisfied(&self) -> usize {
        self.solution.unsatisfied_count()
    }
}

/// `(i_min, i_max)` for the penalty scan over `predictions`.
pub fn partial_scan_bounds<T: Scalar>(graph: &WeightedGraph<T>, kind: DemandKind, predictions: usize) -> (i32, i32) {
    let mut costs: Vec<&T> = graph.edges().iter().map(|e| &e.cost).collect();
    if kind == DemandKind::Client {
        costs.extend(graph.facility_sites().into_iter().map(|v| graph.facility_cost(v).unwrap()));
    }
    let total = costs.iter().fold(T::zero(), |acc, &c| acc + c.clone());
    let smallest = costs.iter().filter(|c| ***c > T::zero()).fold(None, |m: Option<&T>, &c| match m {
        Some(b) if *b <= *c => Some(b),
        _ => Some(c),
    });
    match smallest {
        None => (0, 1),
        Some(c) => {
            let lo = (c.clone() / T::from_count(predictions + 1)).floor_log2();
            (lo, total.ceil_log2() + 1)
        }
    }
}

/// Partial over a fixed prediction set, caching solver calls by exponent.
pub struct PartialOracle<'a, T: Scalar> {
    graph: &'a WeightedGraph<T>,
    base: PenaltyInstance<T>,
    solver: &'a dyn PrizeCollectingSolver<T>,
    bounds: (i32, i32),
    cache: HashMap<i32, PcSolution<T>>,
    empty: PcSolution<T>,
    calls: usize,
}

impl<'a, T: Scalar> PartialOracle<'a, T> {
    /// `predictions` carries the demands and root; its penalty is ignored.
    pub fn new(
        graph: &'a WeightedGraph<T>,
        predictions: PenaltyInstance<T>,
        solver: &'a dyn PrizeCollectingSolver<T>,
    ) -> Result<Self> {
        let bounds = partial_scan_bounds(graph, predictions.kind, predictions.len());
        let empty = PcSolution::empty(graph, &predictions, solver.gamma())?;
        Ok(PartialOracle { graph, base: predictions, solver, bounds, cache: HashMap::new(), empty, calls: 0 })
    }

    pub fn gamma(&self) -> u32 {
        self.solver.gamma()
    }

    pub fn predictions(&self) -> &PenaltyInstance<T> {
        &self.base
    }

    pub fn bounds(&self) -> (i32, i32) {
        self.bounds
    }

    /// Distinct solver invocations so far.
    pub fn solver_calls(&self) -> usize {
        self.calls
    }

    /// Prize-collecting solution at penalty `2^i`.
    pub fn pc(&mut self, i: i32) -> Result<&PcSolution<T>> {
        if !self.cache.contains_key(&i) {
            let inst = self.base.with_penalty(Extended::Finite(T::pow2(i)));
            let sol = self.solver.solve(self.graph, &inst)?;
            self.calls += 1;
            self.cache.insert(i, sol);
        }
        Ok(&self.cache[&i])
    }

    pub fn partial(&mut self, u: usize) -> Result<PartialResult<T>> {
        let n = self.base.len();
        let gamma = self.gamma() as usize;
        if gamma * u >= n {
            return Ok(PartialResult { u, solution: self.empty.clone(), branch: Branch::Empty, exponent: None });
        }
        let limit = gamma * u;
        let (lo, hi) = self.bounds;
        let mut i = lo;
        while self.pc(i)?.unsatisfied_count() > limit {
            i += 1;
            if i > hi + EXTRA_EXPONENTS {
                return Err(Error::Solver(format!(
                    "{} leaves more than {limit} predictions unsatisfied at every penalty up to 2^{}",
                    self.solver.name(),
                    hi + EXTRA_EXPONENTS
                )));
            }
        }
        let u2 = self.pc(i)?.unsatisfied_count();
        let u1 = self.pc(i - 1)?.unsatisfied_count();
        // gamma*u >= (u1 + u2) / 2
        let (branch, exp) = if 2 * limit >= u1 + u2 { (Branch::Lower, i - 1) } else { (Branch::Upper, i) };
        Ok(PartialResult { u, solution: self.cache[&exp].clone(), branch, exponent: Some(i) })
    }

    /// Smallest `u` whose Partial costs at most `budget`, with that result.
    pub fn cheapest_within(&mut self, budget: &T) -> Result<PartialResult<T>> {
        for u in 0..=self.base.len() {
            let p = self.partial(u)?;
            if *p.cost() <= *budget {
                return Ok(p);
            }
        }
        unreachable!("Partial(|R^|) is empty and free")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prize_collecting::{ExactPc, GoemansWilliamsonTree};
    use crate::request::Demand;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn star() -> WeightedGraph<Q> {
        let mut g = WeightedGraph::new(4);
        for i in 1..=3 {
            g.add_edge(0, i, q(1)).unwrap();
        }
        g
    }

    #[test]
    fn scan_bounds() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(8)).unwrap();
        assert_eq!(partial_scan_bounds(&g, DemandKind::Terminal, 1), (2, 4));
        assert_eq!(partial_scan_bounds(&star(), DemandKind::Terminal, 3).0, -2);
        let mut z = WeightedGraph::new(2);
        z.add_edge(0, 1, q(0)).unwrap();
        assert_eq!(partial_scan_bounds(&z, DemandKind::Terminal, 1), (0, 1));
    }

    #[test]
    fn large_u_is_empty() {
        let g = star();
        let inst =
            PenaltyInstance::new(&g, DemandKind::Terminal, (1..=3).map(Demand::Terminal).collect(), Extended::zero(), Some(0))
                .unwrap();
        let mut p = PartialOracle::new(&g, inst, &GoemansWilliamsonTree).unwrap();
        assert_eq!(p.partial(3).unwrap().branch, Branch::Empty);
        assert_eq!(p.partial(2).unwrap().branch, Branch::Empty);
    }

    #[test]
    fn star_partial_against_exact() {
        let g = star();
        let inst =
            PenaltyInstance::new(&g, DemandKind::Terminal, (1..=3).map(Demand::Terminal).collect(), Extended::zero(), Some(0))
                .unwrap();
        let mut p = PartialOracle::new(&g, inst, &ExactPc).unwrap();
        let r = p.partial(1).unwrap();
        assert!(r.unsatisfied() <= 2);
        assert!(*r.cost() <= q(3) * q(2));
        let r = p.partial(0).unwrap();
        assert_eq!(r.unsatisfied(), 0);
        assert_eq!(*r.cost(), q(3));
        assert_eq!(p.cheapest_within(&q(2)).unwrap().u, 2);
    }
}
