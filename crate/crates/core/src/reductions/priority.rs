//! Priority Steiner forest as one independent Steiner forest run per
//! priority class `j`, each on `G_j`, the subgraph of edges with priority
//! at least `j`.

use crate::error::{input, Error, Result};
use crate::error_model::{pareto_frontier, ParetoFrontier};
use crate::framework::{run_with_predictions, standard_engine, RunReport};
use crate::graph::{EdgeId, Priority, WeightedGraph};
use crate::prize_collecting::PrizeCollectingSolver;
use crate::request::{Demand, DemandKind, PredictionSet, Request};
use crate::scalar::Scalar;

/// `G_j` and, for each of its edges, the original edge id.
pub fn priority_class_graph<T: Scalar>(graph: &WeightedGraph<T>, j: Priority) -> (WeightedGraph<T>, Vec<EdgeId>) {
    let mut g = WeightedGraph::new(graph.vertex_count());
    let mut map = Vec::new();
    for (id, e) in graph.edges().iter().enumerate() {
        if e.priority >= j {
            g.add_edge_with_priority(e.u, e.v, e.cost.clone(), e.priority).expect("edge copied from a valid graph");
            map.push(id);
        }
    }
    (g, map)
}

/// Requests and predictions of each class `1..=b`, index `j - 1`.
pub fn split_by_priority(
    requests: &[Request],
    predictions: &PredictionSet,
    b: Priority,
) -> Result<Vec<(Vec<Request>, PredictionSet)>> {
    let mut out = vec![(Vec::new(), PredictionSet::default()); b as usize];
    let class = |d: &Demand| -> Result<usize> {
        match d {
            Demand::TerminalPair { priority, .. } if (1..=b).contains(priority) => Ok(*priority as usize - 1),
            Demand::TerminalPair { priority, .. } => input(format!("{d}: priority {priority} outside 1..={b}")),
            _ => input(format!("{d} is not a terminal pair")),
        }
    };
    for r in requests {
        out[class(&r.demand)?].0.push(r.clone());
    }
    for p in &predictions.items {
        out[class(p)?].1.items.push(p.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PriorityClass<T> {
    pub priority: Priority,
    /// Requests and predictions as given, with their original priority.
    pub requests: Vec<Request>,
    pub predictions: PredictionSet,
    pub report: RunReport<T>,
    /// Bought edges as original edge ids.
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub struct PriorityReport<T> {
    pub classes: Vec<PriorityClass<T>>,
    /// Sum of the per-class totals.
    pub summed_cost: T,
    /// Union of bought edges, ascending.
    pub edges: Vec<EdgeId>,
    /// Cost of that union.
    pub deduplicated_cost: T,
}

impl<T: Scalar> PriorityReport<T> {
    /// Error frontier of one class, measured in the original graph.
    pub fn class_frontier(&self, graph: &WeightedGraph<T>, j: Priority) -> Result<ParetoFrontier<T>> {
        let c = self.classes.iter().find(|c| c.priority == j).ok_or_else(|| Error::Input(format!("no class {j}")))?;
        pareto_frontier(&c.requests, &c.predictions, &graph.metric())
    }
}

fn lowered(d: &Demand) -> Demand {
    match *d {
        Demand::TerminalPair { s, t, .. } => Demand::pair(s, t),
        ref other => other.clone(),
    }
}

/// Runs classes `1..=b` separately and merges the purchases.
pub fn priority_run<T: Scalar>(
    graph: &WeightedGraph<T>,
    requests: &[Request],
    predictions: &PredictionSet,
    b: Priority,
    solver: &dyn PrizeCollectingSolver<T>,
) -> Result<PriorityReport<T>> {
    if b == 0 {
        return input("priority count must be at least 1");
    }
    let split = split_by_priority(requests, predictions, b)?;
    let mut classes = Vec::with_capacity(split.len());
    let mut summed = T::zero();
    let mut union = vec![false; graph.edge_count()];
    for (idx, (reqs, preds)) in split.into_iter().enumerate() {
        let j = idx as Priority + 1;
        let (g, map) = priority_class_graph(graph, j);
        let metric = g.metric();
        for d in reqs.iter().map(|r| &r.demand).chain(&preds.items) {
            let Demand::TerminalPair { s, t, .. } = *d else { unreachable!() };
            if !metric.distance(s, t)?.is_finite() {
                return Err(Error::Infeasible(format!("{d}: endpoints disconnected in G_{j}")));
            }
        }
        let local_reqs: Vec<Request> =
            reqs.iter().map(|r| Request { arrival_index: r.arrival_index, demand: lowered(&r.demand) }).collect();
        let local_preds = PredictionSet::new(preds.items.iter().map(lowered).collect());
        let report = run_with_predictions(
            &g,
            DemandKind::TerminalPair,
            None,
            &local_reqs,
            &local_preds,
            solver,
            standard_engine(&g, DemandKind::TerminalPair, None),
        )?;
        summed = summed + report.total_cost.clone();
        let edges: Vec<EdgeId> = report.edges.iter().map(|&e| map[e]).collect();
        for &e in &edges {
            union[e] = true;
        }
        classes.push(PriorityClass { priority: j, requests: reqs, predictions: preds, report, edges });
    }
    let edges: Vec<EdgeId> = (0..graph.edge_count()).filter(|&e| union[e]).collect();
    let deduplicated_cost = graph.edge_set_cost(&edges);
    Ok(PriorityReport { classes, summed_cost: summed, edges, deduplicated_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::run_engine_only;
    use crate::prize_collecting::LpRoundedForest;
    use crate::request::sequence;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    #[test]
    fn class_graph_filters() {
        let mut g = WeightedGraph::new(3);
        g.add_edge_with_priority(0, 1, q(1), 1).unwrap();
        g.add_edge_with_priority(1, 2, q(1), 2).unwrap();
        let (g2, map) = priority_class_graph(&g, 2);
        assert_eq!(g2.edge_count(), 1);
        assert_eq!(map, vec![1]);
    }

    #[test]
    fn single_class_is_plain_forest() {
        let mut g = WeightedGraph::new(4);
        for i in 0..3 {
            g.add_edge(i, i + 1, q(i as i64 + 1)).unwrap();
        }
        let reqs = sequence([Demand::pair(0, 2), Demand::pair(1, 3)]);
        let r = priority_run(&g, &reqs, &PredictionSet::default(), 1, &LpRoundedForest).unwrap();
        let (plain, _, _) = run_engine_only(&g, &reqs, standard_engine(&g, DemandKind::TerminalPair, None)).unwrap();
        assert_eq!(r.summed_cost, plain);
    }

    #[test]
    fn disconnected_class_is_infeasible() {
        let mut g = WeightedGraph::new(2);
        g.add_edge_with_priority(0, 1, q(1), 1).unwrap();
        let reqs = sequence([Demand::TerminalPair { s: 0, t: 1, priority: 2 }]);
        assert!(matches!(
            priority_run(&g, &reqs, &PredictionSet::default(), 2, &LpRoundedForest),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn out_of_range_priority() {
        let reqs = sequence([Demand::TerminalPair { s: 0, t: 1, priority: 3 }]);
        assert!(split_by_priority(&reqs, &PredictionSet::default(), 2).is_err());
    }
}
