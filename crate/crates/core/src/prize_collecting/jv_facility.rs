//! Prize-collecting facility location by Jain–Vazirani dual ascent with
//! each client's dual capped at the penalty.

use super::{PcSolution, PenaltyInstance, PrizeCollectingSolver};
use crate::error::{input, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Copy, Debug, Default)]
pub struct PrimalDualFacility;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Client {
    Growing,
    Connected,
    Penalized,
}

impl<T: Scalar> PrizeCollectingSolver<T> for PrimalDualFacility {
    fn name(&self) -> &'static str {
        "jv-facility"
    }

    fn gamma(&self) -> u32 {
        3
    }

    fn solve(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<PcSolution<T>> {
        if inst.kind != DemandKind::Client {
            return input("jv-facility solves facility location instances");
        }
        let empty = PcSolution::empty(graph, inst, 3)?;
        if inst.is_empty() || inst.penalty == Extended::zero() {
            return Ok(empty);
        }
        let sites = graph.facility_sites();
        let costs: Vec<T> = sites.iter().map(|&s| graph.facility_cost(s).unwrap().clone()).collect();
        let metric = graph.metric();
        let mut dist: Vec<Vec<Extended<T>>> = Vec::with_capacity(inst.len());
        for d in &inst.demands {
            let Demand::Client(v) = *d else { unreachable!() };
            let row = metric.distances_from(v)?;
            dist.push(sites.iter().map(|&s| row[s].clone()).collect());
        }

        let (opened, alpha) = dual_ascent(&costs, &dist, &inst.penalty);

        // maximal independent set in opening order; two facilities conflict
        // when some client pays a positive amount to both
        let mut chosen: Vec<usize> = Vec::new();
        for &i in &opened {
            let conflicts = chosen.iter().any(|&k| {
                dist.iter().zip(&alpha).any(|(row, a)| contributes(a, &row[i]) && contributes(a, &row[k]))
            });
            if !conflicts {
                chosen.push(i);
            }
        }

        // each client takes the cheaper of its nearest chosen facility and the penalty
        let mut assignment: Vec<Option<VertexId>> = vec![None; inst.len()];
        for (j, row) in dist.iter().enumerate() {
            let mut best: Option<usize> = None;
            for &i in &chosen {
                if row[i].is_finite() && best.map_or(true, |b| row[i] < row[b] || (row[i] == row[b] && i < b)) {
                    best = Some(i);
                }
            }
            if let Some(i) = best {
                if row[i] <= inst.penalty {
                    assignment[j] = Some(sites[i]);
                }
            }
        }
        let mut used: Vec<VertexId> = assignment.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let primal = PcSolution::build(graph, inst, Vec::new(), used, assignment, 3)?;
        Ok(primal.better(empty))
    }
}

fn contributes<T: Scalar>(alpha: &T, d: &Extended<T>) -> bool {
    matches!(d, Extended::Finite(d) if alpha > d)
}

/// Grows all client duals together. Returns the temporarily opened sites
/// in order and each client's final dual.
fn dual_ascent<T: Scalar>(costs: &[T], dist: &[Vec<Extended<T>>], penalty: &Extended<T>) -> (Vec<usize>, Vec<T>) {
    let m = costs.len();
    let mut state = vec![Client::Growing; dist.len()];
    let mut alpha = vec![T::zero(); dist.len()];
    let mut paid = vec![T::zero(); m];
    let mut is_open = vec![false; m];
    let mut opened: Vec<usize> = Vec::new();
    let mut now = T::zero();
    loop {
        for i in 0..m {
            let reached = (0..dist.len()).any(|j| state[j] == Client::Growing && tight(&dist[j][i], &now));
            if !is_open[i] && paid[i] >= costs[i] && reached {
                is_open[i] = true;
                opened.push(i);
            }
        }
        for (j, row) in dist.iter().enumerate() {
            if state[j] != Client::Growing {
                continue;
            }
            if (0..m).any(|i| is_open[i] && tight(&row[i], &now)) {
                state[j] = Client::Connected;
            } else if Extended::Finite(now.clone()) >= *penalty {
                state[j] = Client::Penalized;
            }
            alpha[j] = now.clone();
        }
        let growing: Vec<usize> = (0..dist.len()).filter(|&j| state[j] == Client::Growing).collect();
        if growing.is_empty() {
            break;
        }
        let rates: Vec<usize> =
            (0..m).map(|i| growing.iter().filter(|&&j| tight(&dist[j][i], &now)).count()).collect();
        let mut next: Extended<T> = penalty.clone();
        for &j in &growing {
            for d in dist[j].iter().filter_map(|d| d.finite()) {
                if *d > now {
                    next = next.min(Extended::Finite(d.clone()));
                }
            }
        }
        for i in (0..m).filter(|&i| !is_open[i] && rates[i] > 0) {
            let t = now.clone() + (costs[i].clone() - paid[i].clone()).positive_part() / T::from_count(rates[i]);
            next = next.min(Extended::Finite(t));
        }
        // only unreachable clients with an infinite penalty remain
        let Extended::Finite(next) = next else { break };
        let step = next.clone() - now.clone();
        for i in (0..m).filter(|&i| !is_open[i]) {
            paid[i] = paid[i].clone() + step.clone() * T::from_count(rates[i]);
        }
        now = next;
    }
    (opened, alpha)
}

fn tight<T: Scalar>(d: &Extended<T>, now: &T) -> bool {
    matches!(d, Extended::Finite(d) if d <= now)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn solve(g: &WeightedGraph<Q>, clients: &[VertexId], x: Extended<Q>) -> PcSolution<Q> {
        let demands = clients.iter().map(|&v| Demand::Client(v)).collect();
        let inst = PenaltyInstance::new(g, DemandKind::Client, demands, x, None).unwrap();
        let s = PrimalDualFacility.solve(g, &inst).unwrap();
        s.verify(g, &inst).unwrap();
        s
    }

    #[test]
    fn zero_penalty_opens_nothing() {
        let mut g = WeightedGraph::new(1);
        g.set_facility_cost(0, Some(q(1))).unwrap();
        let s = solve(&g, &[0], Extended::Finite(q(0)));
        assert!(s.facilities.is_empty());
    }

    #[test]
    fn colocated_client_opens() {
        let mut g = WeightedGraph::new(1);
        g.set_facility_cost(0, Some(q(1))).unwrap();
        let s = solve(&g, &[0], Extended::Finite(q(5)));
        assert_eq!(s.facilities, vec![0]);
        assert_eq!(s.objective, Extended::Finite(q(1)));
    }

    #[test]
    fn two_clusters() {
        // clusters around facilities 0 and 3, far apart
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, q(1)).unwrap();
        g.add_edge(1, 2, q(20)).unwrap();
        g.add_edge(2, 3, q(1)).unwrap();
        g.set_facility_cost(0, Some(q(2))).unwrap();
        g.set_facility_cost(3, Some(q(2))).unwrap();
        let s = solve(&g, &[0, 1, 2, 3], Extended::Finite(q(100)));
        assert_eq!(s.facilities, vec![0, 3]);
        assert_eq!(s.objective, Extended::Finite(q(6)));
    }

    #[test]
    fn unreachable_client_pays() {
        let mut g = WeightedGraph::new(2);
        g.set_facility_cost(0, Some(q(1))).unwrap();
        let s = solve(&g, &[0, 1], Extended::Finite(q(3)));
        assert_eq!(s.satisfied, vec![true, false]);
        assert_eq!(s.objective, Extended::Finite(q(4)));
    }
}
