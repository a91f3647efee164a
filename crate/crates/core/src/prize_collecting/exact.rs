//! Exact prize-collecting optimum by enumeration. The central object is the
//! profile: for every count `s`, the cheapest solution leaving `s` demands
//! unsatisfied. Penalty optima and quota optima both read off it.

use super::{PcSolution, PenaltyInstance, PrizeCollectingSolver};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::oracles::facility::FacilityEnumeration;
use crate::oracles::steiner_forest::{ForestTable, PairSpec};
use crate::oracles::DreyfusWagner;
use crate::oracles::OracleBudget;
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileEntry<T> {
    pub cost: T,
    pub edges: Vec<EdgeId>,
    pub facilities: Vec<VertexId>,
    pub assignment: Vec<Option<VertexId>>,
}

/// `entries[s]`: cheapest solution with `s` unsatisfied demands, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile<T> {
    pub entries: Vec<Option<ProfileEntry<T>>>,
}

impl<T: Scalar> Profile<T> {
    /// Cheapest solution leaving at most `u` demands unsatisfied, with its
    /// unsatisfied count.
    pub fn within(&self, u: usize) -> Option<(usize, &ProfileEntry<T>)> {
        let mut best: Option<(usize, &ProfileEntry<T>)> = None;
        for (s, e) in self.entries.iter().enumerate().take(u + 1) {
            if let Some(e) = e {
                if best.map_or(true, |(_, b)| e.cost < b.cost) {
                    best = Some((s, e));
                }
            }
        }
        best
    }

    /// Penalty optimum; ties go to fewer unsatisfied demands.
    pub fn for_penalty(&self, penalty: &Extended<T>) -> Option<(usize, &ProfileEntry<T>)> {
        let mut best: Option<(Extended<T>, usize, &ProfileEntry<T>)> = None;
        for (s, e) in self.entries.iter().enumerate() {
            let Some(e) = e else { continue };
            let pen = match (s, penalty) {
                (0, _) => Extended::zero(),
                (_, Extended::Finite(x)) => Extended::Finite(x.clone() * T::from_count(s)),
                (_, Extended::Infinite) => Extended::Infinite,
            };
            let obj = pen.add_finite(&e.cost);
            if best.as_ref().map_or(true, |(b, ..)| obj < *b) {
                best = Some((obj, s, e));
            }
        }
        best.map(|(_, s, e)| (s, e))
    }

    pub fn solution(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>, entry: &ProfileEntry<T>) -> Result<PcSolution<T>> {
        PcSolution::build(graph, inst, entry.edges.clone(), entry.facilities.clone(), entry.assignment.clone(), 1)
    }
}

fn offer<T: Scalar>(slots: &mut [Option<(T, usize)>], s: usize, cost: T, key: usize) {
    if slots[s].as_ref().map_or(true, |(c, _)| cost < *c) {
        slots[s] = Some((cost, key));
    }
}

/// Profile of a prize-collecting instance (the penalty is ignored).
pub fn exact_profile<T: Scalar>(graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<Profile<T>> {
    let n = inst.len();
    if n > OracleBudget::DEFAULT.max_terminals {
        return Err(Error::OverBudget { what: "requests", limit: OracleBudget::DEFAULT.max_terminals, actual: n });
    }
    let mut entries: Vec<Option<ProfileEntry<T>>> = vec![None; n + 1];
    match inst.kind {
        DemandKind::Terminal => {
            let root = inst.root.unwrap();
            let mut points = vec![root];
            let mut weight = vec![0usize];
            for d in &inst.demands {
                let Demand::Terminal(v) = *d else { unreachable!() };
                if v == root {
                    continue;
                }
                if let Some(i) = points.iter().position(|&p| p == v) {
                    weight[i] += 1;
                } else {
                    points.push(v);
                    weight.push(1);
                }
            }
            let dw = DreyfusWagner::new(graph, 1, &points)?;
            let k = points.len() - 1;
            let mut slots: Vec<Option<(T, usize)>> = vec![None; n + 1];
            for mask in 0..(1usize << k) {
                let full = (mask << 1) | 1;
                let Extended::Finite(c) = dw.cost(full) else { continue };
                let unsat: usize = (0..k).filter(|i| mask & (1 << i) == 0).map(|i| weight[i + 1]).sum();
                offer(&mut slots, unsat, c, full);
            }
            for (s, slot) in slots.into_iter().enumerate() {
                if let Some((cost, full)) = slot {
                    entries[s] =
                        Some(ProfileEntry { cost, edges: dw.edges(full), facilities: Vec::new(), assignment: vec![None; n] });
                }
            }
        }
        DemandKind::TerminalPair => {
            let mut pairs: Vec<PairSpec> = Vec::new();
            for d in &inst.demands {
                let Demand::TerminalPair { s, t, .. } = *d else { unreachable!() };
                if s != t {
                    pairs.push((s, t, 1));
                }
            }
            let table = ForestTable::new(graph, &pairs)?;
            let mut slots: Vec<Option<(T, usize)>> = vec![None; n + 1];
            for (sat, entry) in table.best.iter().enumerate() {
                if let Some((c, em)) = entry {
                    let unsat = pairs.len() - sat.count_ones() as usize;
                    offer(&mut slots, unsat, c.clone(), *em as usize);
                }
            }
            for (s, slot) in slots.into_iter().enumerate() {
                if let Some((cost, em)) = slot {
                    entries[s] = Some(ProfileEntry {
                        cost,
                        edges: ForestTable::<T>::edges_of(em as u32),
                        facilities: Vec::new(),
                        assignment: vec![None; n],
                    });
                }
            }
        }
        DemandKind::Client => {
            let clients: Vec<VertexId> = inst
                .demands
                .iter()
                .map(|d| match *d {
                    Demand::Client(v) => v,
                    _ => unreachable!(),
                })
                .collect();
            let en = FacilityEnumeration::new(graph, &clients)?;
            entries[n] = Some(ProfileEntry {
                cost: T::zero(),
                edges: Vec::new(),
                facilities: Vec::new(),
                assignment: vec![None; n],
            });
            let mut slots: Vec<Option<(T, usize)>> = vec![None; n + 1];
            let mut order: Vec<usize> = Vec::with_capacity(n);
            en.for_each_subset(|mask, opening, nearest| {
                order.clear();
                order.extend((0..n).filter(|&j| nearest[j].1.is_finite()));
                order.sort_by(|&a, &b| nearest[a].1.total_cmp(&nearest[b].1).then(a.cmp(&b)));
                let mut cost = opening.clone();
                for served in 0..=order.len() {
                    if served > 0 {
                        cost = cost + nearest[order[served - 1]].1.finite().unwrap().clone();
                    }
                    offer(&mut slots, n - served, cost.clone(), mask);
                }
            });
            for (s, slot) in slots.into_iter().enumerate() {
                let Some((cost, mask)) = slot else { continue };
                if entries[s].as_ref().map_or(false, |e| e.cost <= cost) {
                    continue;
                }
                // rebuild the assignment: the n - s nearest clients are served
                let mut nearest: Vec<(usize, Extended<T>)> = Vec::with_capacity(n);
                for row in &en.dist {
                    let best = (0..en.sites.len())
                        .filter(|&i| mask & (1 << i) != 0)
                        .min_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)))
                        .unwrap();
                    nearest.push((best, row[best].clone()));
                }
                let mut order: Vec<usize> = (0..n).filter(|&j| nearest[j].1.is_finite()).collect();
                order.sort_by(|&a, &b| nearest[a].1.total_cmp(&nearest[b].1).then(a.cmp(&b)));
                let mut assignment = vec![None; n];
                for &j in order.iter().take(n - s) {
                    assignment[j] = Some(en.sites[nearest[j].0]);
                }
                let facilities = (0..en.sites.len()).filter(|&i| mask & (1 << i) != 0).map(|i| en.sites[i]).collect();
                entries[s] = Some(ProfileEntry { cost, edges: Vec::new(), facilities, assignment });
            }
        }
    }
    Ok(Profile { entries })
}

/// Exact solver, `gamma = 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactPc;

impl<T: Scalar> PrizeCollectingSolver<T> for ExactPc {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn gamma(&self) -> u32 {
        1
    }

    fn solve(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<PcSolution<T>> {
        let profile = exact_profile(graph, inst)?;
        match profile.for_penalty(&inst.penalty) {
            Some((_, e)) => profile.solution(graph, inst, e),
            None => PcSolution::empty(graph, inst, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: u64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn star_with_low_penalty() {
        let mut g = WeightedGraph::new(4);
        for i in 1..=3 {
            g.add_edge(0, i, q(1, 1)).unwrap();
        }
        let demands = (1..=3).map(Demand::Terminal).collect();
        let inst = PenaltyInstance::new(&g, DemandKind::Terminal, demands, Extended::Finite(q(6, 10)), Some(0)).unwrap();
        let s = ExactPc.solve(&g, &inst).unwrap();
        assert_eq!(s.objective, Extended::Finite(q(18, 10)));
        let profile = exact_profile(&g, &inst).unwrap();
        let costs: Vec<Q> = profile.entries.iter().map(|e| e.as_ref().unwrap().cost.clone()).collect();
        assert_eq!(costs, vec![q(3, 1), q(2, 1), q(1, 1), q(0, 1)]);
    }

    #[test]
    fn empty_request_set() {
        let g: WeightedGraph<Q> = WeightedGraph::new(1);
        let inst = PenaltyInstance::new(&g, DemandKind::TerminalPair, vec![], Extended::Finite(q(1, 1)), None).unwrap();
        assert_eq!(ExactPc.solve(&g, &inst).unwrap().objective, Extended::zero());
    }

    #[test]
    fn facility_profile_penalizes_farthest() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(1, 1)).unwrap();
        g.add_edge(1, 2, q(5, 1)).unwrap();
        g.set_facility_cost(0, Some(q(2, 1))).unwrap();
        let demands = vec![Demand::Client(2), Demand::Client(1)];
        let inst = PenaltyInstance::new(&g, DemandKind::Client, demands, Extended::Finite(q(4, 1)), None).unwrap();
        let s = ExactPc.solve(&g, &inst).unwrap();
        // open at 0, serve client at 1 (cost 1), penalize the one at 2
        assert_eq!(s.satisfied, vec![false, true]);
        assert_eq!(s.objective, Extended::Finite(q(7, 1)));
        s.verify(&g, &inst).unwrap();
    }

    #[test]
    fn forest_profile_counts_pairs() {
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, q(2, 1)).unwrap();
        g.add_edge(2, 3, q(3, 1)).unwrap();
        let demands = vec![Demand::pair(0, 1), Demand::pair(2, 3), Demand::pair(1, 1)];
        let inst = PenaltyInstance::new(&g, DemandKind::TerminalPair, demands, Extended::Infinite, None).unwrap();
        let p = exact_profile(&g, &inst).unwrap();
        assert_eq!(p.within(0).unwrap().1.cost, q(5, 1));
        assert_eq!(p.within(1).unwrap().1.cost, q(2, 1));
        assert_eq!(p.within(2).unwrap().1.cost, q(0, 1));
        assert_eq!(ExactPc.solve(&g, &inst).unwrap().objective, Extended::Finite(q(5, 1)));
    }
}
