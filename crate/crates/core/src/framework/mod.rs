//! Online algorithm with predictions: serve with an online engine, and each
//! time the online cost doubles buy a Partial solution for the predictions
//! and restart the engine with everything owned made free.

pub mod partial;

pub use partial::{partial_scan_bounds, Branch, PartialOracle, PartialResult};

use crate::engines::{BermanCoulston, Fotakis, GreedyTree, OnlineEngine, ServeRecord};
use crate::error::{input, Error, Result};
use crate::error_model::ParetoFrontier;
use crate::graph::{EdgeId, VertexId, WeightedGraph, ZeroCostOverlay};
use crate::prize_collecting::{PenaltyInstance, PrizeCollectingSolver};
use crate::request::{check_demands, DemandKind, PredictionSet, Request};
use crate::scalar::{Extended, Scalar};
use serde_json::{json, Value};

/// Builds a fresh engine over an overlay.
pub type EngineFactory<'g, T> = Box<dyn FnMut(ZeroCostOverlay) -> Result<Box<dyn OnlineEngine<T> + 'g>> + 'g>;

/// The standard engine for `kind`: greedy tree, Berman–Coulston, Fotakis.
pub fn standard_engine<'g, T: Scalar>(
    graph: &'g WeightedGraph<T>,
    kind: DemandKind,
    root: Option<VertexId>,
) -> EngineFactory<'g, T> {
    Box::new(move |overlay| -> Result<Box<dyn OnlineEngine<T> + 'g>> {
        Ok(match kind {
            DemandKind::Terminal => {
                let root = root.ok_or_else(|| Error::Configuration("Steiner tree needs a root".into()))?;
                Box::new(GreedyTree::new(graph, root, overlay)?)
            }
            DemandKind::TerminalPair => Box::new(BermanCoulston::new(graph, overlay)),
            DemandKind::Client => Box::new(Fotakis::new(graph, overlay)?),
        })
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MajorIteration<T> {
    /// Request position (0-based) whose service triggered it.
    pub iteration: usize,
    /// `B^` before this iteration.
    pub previous_b_hat: T,
    /// `B^` after, equal to `B` at this point.
    pub b_hat: T,
    pub u: usize,
    pub branch: Branch,
    pub exponent: Option<i32>,
    /// `c(Partial)` in original costs.
    pub partial_cost: T,
    pub partial_unsatisfied: usize,
    /// Cost of Partial elements not already owned.
    pub paid: T,
    /// Connection cost inside the Partial solution (facility location);
    /// paid later, by the online engine, when clients actually arrive.
    pub committed: T,
    pub restarted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phase<T> {
    pub id: usize,
    /// First request position of the phase.
    pub start: usize,
    pub requests: usize,
    /// `ON_j`: sum of charged costs (amortized for facility location).
    pub charged: T,
    pub actual: T,
}

#[derive(Clone, Debug)]
pub struct RunReport<T> {
    pub online_actual: T,
    /// Final `B`.
    pub online_charged: T,
    pub partial_paid: T,
    /// Online actual plus Partial purchases.
    pub total_cost: T,
    pub majors: Vec<MajorIteration<T>>,
    pub phases: Vec<Phase<T>>,
    pub trace: Vec<ServeRecord<T>>,
    /// Phase of each request.
    pub request_phase: Vec<usize>,
    pub edges: Vec<EdgeId>,
    pub facilities: Vec<VertexId>,
    pub gamma: u32,
}

impl<T: Scalar> RunReport<T> {
    /// For every major iteration `i` and every later cut-off `m`:
    /// `sum_{j <= m-2} ON_j <= ON_{m-1}` with phases counted from `i`.
    /// Returns the violations as `(major index, m)`.
    pub fn telescoping_violations(&self) -> Vec<(usize, usize)> {
        // phase k covers the requests after major k - 1; phases after major
        // a are k = a+1, a+2, ...
        let mut out = Vec::new();
        for a in 0..self.majors.len() {
            let first = a + 1;
            let ons: Vec<T> = self.phases.iter().skip(first).map(|p| p.charged.clone()).collect();
            let mut prefix = T::zero();
            for m in 1..ons.len() {
                // prefix = sum_{j <= m-2}
                if prefix > ons[m - 1] {
                    out.push((a, m));
                }
                prefix = prefix + ons[m - 1].clone();
            }
        }
        out
    }

    /// Major iterations where the Partial costs bought so far exceed
    /// `6·gamma·B^`.
    pub fn partial_growth_violations(&self) -> Vec<usize> {
        let six_gamma = T::from_count(6 * self.gamma as usize);
        let mut sum = T::zero();
        let mut out = Vec::new();
        for (k, m) in self.majors.iter().enumerate() {
            sum = sum + m.partial_cost.clone();
            if sum > six_gamma.clone() * m.b_hat.clone() {
                out.push(k);
            }
        }
        out
    }

    /// Major iterations whose Partial exceeded its `3·gamma·B^` budget.
    pub fn budget_violations(&self) -> Vec<usize> {
        let three_gamma = T::from_count(3 * self.gamma as usize);
        (0..self.majors.len())
            .filter(|&k| self.majors[k].partial_cost > three_gamma.clone() * self.majors[k].b_hat.clone())
            .collect()
    }

    /// `B^` just before the first major iteration whose `u` is at most
    /// `predictions - k`; `None` when no major iteration qualifies.
    pub fn b_hat_before_first_within(&self, predictions: usize, k: usize) -> Option<T> {
        let cutoff = predictions.saturating_sub(k);
        self.majors.iter().find(|m| m.u <= cutoff).map(|m| m.previous_b_hat.clone())
    }

    /// `B^_{i-1} <= OPT + D` for every frontier point. Returns the failing
    /// `(delta, D, B^_{i-1})`.
    pub fn b_hat_violations(&self, predictions: usize, frontier: &ParetoFrontier<T>, opt: &T) -> Vec<(usize, T, T)> {
        let mut out = Vec::new();
        for (delta, d, k) in frontier.triples() {
            if let Some(b) = self.b_hat_before_first_within(predictions, k) {
                if b > opt.clone() + d.clone() {
                    out.push((delta, d, b));
                }
            }
        }
        out
    }

    /// `(B^_{i-1}, max(ON_{m-1}, ON_m))` relative to major iteration `a`,
    /// with `m` the last phase.
    pub fn decomposition(&self, a: usize) -> Option<(T, T)> {
        let major = self.majors.get(a)?;
        let tail: Vec<&Phase<T>> = self.phases.iter().skip(a + 1).collect();
        let last = tail.len();
        let max_on = tail
            .iter()
            .skip(last.saturating_sub(2))
            .map(|p| p.charged.clone())
            .fold(T::zero(), T::max_of);
        Some((major.previous_b_hat.clone(), max_on))
    }

    pub fn to_json(&self) -> Value {
        let num = |x: &T| json!({ "value": x.as_f64(), "exact": x.to_string() });
        json!({
            "total_cost": num(&self.total_cost),
            "online_actual": num(&self.online_actual),
            "online_charged": num(&self.online_charged),
            "partial_paid": num(&self.partial_paid),
            "gamma": self.gamma,
            "edges": self.edges,
            "facilities": self.facilities,
            "phases": self.phases.iter().map(|p| json!({
                "id": p.id,
                "start": p.start,
                "requests": p.requests,
                "charged": num(&p.charged),
                "actual": num(&p.actual),
            })).collect::<Vec<_>>(),
            "major_iterations": self.majors.iter().map(|m| json!({
                "iteration": m.iteration,
                "previous_b_hat": num(&m.previous_b_hat),
                "b_hat": num(&m.b_hat),
                "u": m.u,
                "branch": m.branch,
                "exponent": m.exponent,
                "partial_cost": num(&m.partial_cost),
                "partial_unsatisfied": m.partial_unsatisfied,
                "paid": num(&m.paid),
                "committed": num(&m.committed),
                "restarted": m.restarted,
            })).collect::<Vec<_>>(),
            "checks": {
                "telescoping_violations": self.telescoping_violations().len(),
                "partial_growth_violations": self.partial_growth_violations().len(),
                "budget_violations": self.budget_violations().len(),
            },
        })
    }

    /// Per-request trace: `arrival_index,phase,actual_cost,charged_cost,elements`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("arrival_index,phase,actual_cost,charged_cost,elements\n");
        for (i, r) in self.trace.iter().enumerate() {
            let elements: Vec<String> = if r.opened_facilities.is_empty() {
                r.bought_edges.iter().map(|e| format!("e{e}")).collect()
            } else {
                r.opened_facilities.iter().map(|v| format!("f{v}")).collect()
            };
            out.push_str(&format!("{i},{},{},{},{}\n", self.request_phase[i], r.actual, r.charged, elements.join(" ")));
        }
        out
    }
}

/// One episode of the framework.
pub struct Framework<'g, T: Scalar> {
    graph: &'g WeightedGraph<T>,
    kind: DemandKind,
    partial: PartialOracle<'g, T>,
    factory: EngineFactory<'g, T>,
    engine: Box<dyn OnlineEngine<T> + 'g>,
    owned: ZeroCostOverlay,
    b: T,
    b_hat: T,
    online_actual: T,
    partial_paid: T,
    majors: Vec<MajorIteration<T>>,
    phases: Vec<Phase<T>>,
    trace: Vec<ServeRecord<T>>,
    request_phase: Vec<usize>,
}

impl<'g, T: Scalar> Framework<'g, T> {
    pub fn new(
        graph: &'g WeightedGraph<T>,
        kind: DemandKind,
        root: Option<VertexId>,
        predictions: &PredictionSet,
        solver: &'g dyn PrizeCollectingSolver<T>,
        mut factory: EngineFactory<'g, T>,
    ) -> Result<Self> {
        let inst = PenaltyInstance::new(graph, kind, predictions.items.clone(), Extended::zero(), root)?;
        let partial = PartialOracle::new(graph, inst, solver)?;
        let owned = ZeroCostOverlay::new(graph);
        let engine = factory(owned.clone())?;
        if engine.demand_kind() != kind {
            return input(format!("engine serves {:?}, problem needs {kind:?}", engine.demand_kind()));
        }
        Ok(Framework {
            graph,
            kind,
            partial,
            factory,
            engine,
            owned,
            b: T::zero(),
            b_hat: T::zero(),
            online_actual: T::zero(),
            partial_paid: T::zero(),
            majors: Vec::new(),
            phases: vec![Phase { id: 0, start: 0, requests: 0, charged: T::zero(), actual: T::zero() }],
            trace: Vec::new(),
            request_phase: Vec::new(),
        })
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn b_hat(&self) -> &T {
        &self.b_hat
    }

    pub fn owned(&self) -> &ZeroCostOverlay {
        &self.owned
    }

    /// Online actual cost plus Partial purchases so far.
    pub fn total_cost(&self) -> T {
        self.online_actual.clone() + self.partial_paid.clone()
    }

    /// Serves one request; returns the major iteration it triggered, if any.
    pub fn step(&mut self, request: &Request) -> Result<Option<&MajorIteration<T>>> {
        check_demands(self.graph, self.kind, [&request.demand])?;
        let position = self.trace.len();
        let record = self.engine.serve(&request.demand)?;
        for &e in &record.bought_edges {
            self.owned.zero_edge(e);
        }
        for &v in &record.opened_facilities {
            self.owned.zero_facility(v);
        }
        self.b = self.b.clone() + record.charged.clone();
        self.online_actual = self.online_actual.clone() + record.actual.clone();
        let phase = self.phases.last_mut().unwrap();
        phase.requests += 1;
        phase.charged = phase.charged.clone() + record.charged.clone();
        phase.actual = phase.actual.clone() + record.actual.clone();
        self.request_phase.push(phase.id);
        self.trace.push(record);

        // B = B^ = 0 does not trigger
        let two = T::from_count(2);
        if self.b <= T::zero() || self.b < two * self.b_hat.clone() {
            return Ok(None);
        }
        let previous_b_hat = std::mem::replace(&mut self.b_hat, self.b.clone());
        let budget = T::from_count(3 * self.partial.gamma() as usize) * self.b_hat.clone();
        let chosen = self.partial.cheapest_within(&budget)?;
        let sol = &chosen.solution;
        let mut paid = T::zero();
        let mut fresh = false;
        for &e in &sol.edges {
            if !self.owned.has_edge(e) {
                paid = paid + self.graph.edge(e).cost.clone();
                self.owned.zero_edge(e);
                fresh = true;
            }
        }
        let mut opening = T::zero();
        for &v in &sol.facilities {
            let f = self.graph.facility_cost(v).unwrap().clone();
            opening = opening + f.clone();
            if !self.owned.has_facility(v) {
                paid = paid + f;
                self.owned.zero_facility(v);
                fresh = true;
            }
        }
        let committed = if self.kind == DemandKind::Client {
            sol.element_cost.clone() - opening
        } else {
            T::zero()
        };
        // Nothing new to make free: the running engine is kept, so an empty
        // prediction reproduces the plain online run exactly.
        if fresh {
            self.engine = (self.factory)(self.owned.clone())?;
        }
        self.partial_paid = self.partial_paid.clone() + paid.clone();
        self.phases.push(Phase {
            id: self.phases.len(),
            start: position + 1,
            requests: 0,
            charged: T::zero(),
            actual: T::zero(),
        });
        self.majors.push(MajorIteration {
            iteration: position,
            previous_b_hat,
            b_hat: self.b_hat.clone(),
            u: chosen.u,
            branch: chosen.branch,
            exponent: chosen.exponent,
            partial_cost: sol.element_cost.clone(),
            partial_unsatisfied: sol.unsatisfied_count(),
            paid,
            committed,
            restarted: fresh,
        });
        Ok(self.majors.last())
    }

    pub fn finish(self) -> RunReport<T> {
        let mut edges: Vec<EdgeId> = self.owned.zeroed_edges().collect();
        edges.sort_unstable();
        let facilities: Vec<VertexId> = self.owned.zeroed_facilities().collect();
        RunReport {
            total_cost: self.online_actual.clone() + self.partial_paid.clone(),
            online_actual: self.online_actual,
            online_charged: self.b,
            partial_paid: self.partial_paid,
            majors: self.majors,
            phases: self.phases,
            trace: self.trace,
            request_phase: self.request_phase,
            edges,
            facilities,
            gamma: self.partial.gamma(),
        }
    }
}

/// Runs a whole request sequence through the framework.
pub fn run_with_predictions<'g, T: Scalar>(
    graph: &'g WeightedGraph<T>,
    kind: DemandKind,
    root: Option<VertexId>,
    requests: &[Request],
    predictions: &PredictionSet,
    solver: &'g dyn PrizeCollectingSolver<T>,
    factory: EngineFactory<'g, T>,
) -> Result<RunReport<T>> {
    let mut fw = Framework::new(graph, kind, root, predictions, solver, factory)?;
    for r in requests {
        fw.step(r)?;
    }
    Ok(fw.finish())
}

/// The engine alone on the same sequence; returns `(actual, charged)` and
/// the log.
pub fn run_engine_only<T: Scalar>(
    graph: &WeightedGraph<T>,
    requests: &[Request],
    mut factory: EngineFactory<'_, T>,
) -> Result<(T, T, Vec<ServeRecord<T>>)> {
    let mut engine = factory(ZeroCostOverlay::new(graph))?;
    for r in requests {
        engine.serve(&r.demand)?;
    }
    Ok((engine.total_actual(), engine.total_charged(), engine.log().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prize_collecting::{ExactPc, GoemansWilliamsonTree};
    use crate::request::{sequence, Demand};
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn star(spokes: usize) -> WeightedGraph<Q> {
        let mut g = WeightedGraph::new(spokes + 1);
        for i in 1..=spokes {
            g.add_edge(0, i, q(1)).unwrap();
        }
        g
    }

    #[test]
    fn empty_prediction_matches_engine() {
        let g = star(4);
        let reqs = sequence((1..=4).map(Demand::Terminal));
        let solver = GoemansWilliamsonTree;
        let fw = run_with_predictions(
            &g,
            DemandKind::Terminal,
            Some(0),
            &reqs,
            &PredictionSet::default(),
            &solver,
            standard_engine(&g, DemandKind::Terminal, Some(0)),
        )
        .unwrap();
        let (actual, _, _) = run_engine_only(&g, &reqs, standard_engine(&g, DemandKind::Terminal, Some(0))).unwrap();
        assert_eq!(fw.total_cost, actual);
        assert!(fw.majors.iter().all(|m| !m.restarted));
    }

    #[test]
    fn perfect_prediction_first_request_triggers() {
        let g = star(3);
        let reqs = sequence((1..=3).map(Demand::Terminal));
        let preds = PredictionSet::from_requests(&reqs);
        let solver = ExactPc;
        let mut fw = Framework::new(
            &g,
            DemandKind::Terminal,
            Some(0),
            &preds,
            &solver,
            standard_engine(&g, DemandKind::Terminal, Some(0)),
        )
        .unwrap();
        let m = fw.step(&reqs[0]).unwrap().cloned().unwrap();
        assert_eq!(m.b_hat, q(1));
        // budget 3: the whole star fits, u = 0
        assert_eq!(m.u, 0);
        assert!(m.restarted);
        fw.step(&reqs[1]).unwrap();
        fw.step(&reqs[2]).unwrap();
        let report = fw.finish();
        // edge 0-1 is already owned when Partial buys the star
        assert_eq!(report.total_cost, q(3));
        assert_eq!(report.majors[0].paid, q(2));
        assert!(report.telescoping_violations().is_empty());
        assert!(report.partial_growth_violations().is_empty());
    }

    #[test]
    fn zero_cost_prefix_does_not_trigger() {
        let g = star(2);
        let reqs = sequence([Demand::Terminal(0), Demand::Terminal(1)]);
        let solver = GoemansWilliamsonTree;
        let report = run_with_predictions(
            &g,
            DemandKind::Terminal,
            Some(0),
            &reqs,
            &PredictionSet::new(vec![Demand::Terminal(2)]),
            &solver,
            standard_engine(&g, DemandKind::Terminal, Some(0)),
        )
        .unwrap();
        assert_eq!(report.majors.len(), 1);
        assert_eq!(report.majors[0].iteration, 1);
        assert_eq!(report.request_phase, vec![0, 0]);
    }
}
