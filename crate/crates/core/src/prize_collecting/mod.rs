//! Prize-collecting solvers: every request is either served or pays a
//! uniform penalty `x`.

pub mod exact;
pub mod gw_forest;
pub mod gw_tree;
pub mod jv_facility;

pub use exact::{exact_profile, ExactPc, Profile};
pub use gw_forest::LpRoundedForest;
pub use gw_tree::GoemansWilliamsonTree;
pub use jv_facility::PrimalDualFacility;

use crate::error::{input, Error, Result};
use crate::graph::{EdgeId, UnionFind, VertexId, WeightedGraph};
use crate::request::{check_demands, Demand, DemandKind};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyInstance<T> {
    pub kind: DemandKind,
    pub demands: Vec<Demand>,
    /// Paid by every unsatisfied demand.
    pub penalty: Extended<T>,
    /// Steiner tree only.
    pub root: Option<VertexId>,
}

impl<T: Scalar> PenaltyInstance<T> {
    pub fn new(
        graph: &WeightedGraph<T>,
        kind: DemandKind,
        demands: Vec<Demand>,
        penalty: Extended<T>,
        root: Option<VertexId>,
    ) -> Result<Self> {
        check_demands(graph, kind, &demands)?;
        if let Extended::Finite(x) = &penalty {
            if *x < T::zero() {
                return input(format!("negative penalty {x}"));
            }
        }
        match (kind, root) {
            (DemandKind::Terminal, None) => return input("Steiner tree needs a root"),
            (DemandKind::Terminal, Some(r)) => graph.check_vertex(r)?,
            _ => {}
        }
        if kind == DemandKind::Client && !graph.has_facility_data() {
            return Err(Error::Configuration("facility location needs facility costs".into()));
        }
        Ok(PenaltyInstance { kind, demands, penalty, root })
    }

    pub fn with_penalty(&self, penalty: Extended<T>) -> Self {
        PenaltyInstance { penalty, ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    /// `x * count`, with `inf * 0 = 0`.
    pub fn penalty_for(&self, count: usize) -> Extended<T> {
        if count == 0 {
            return Extended::zero();
        }
        match &self.penalty {
            Extended::Finite(x) => Extended::Finite(x.clone() * T::from_count(count)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcSolution<T> {
    /// Ascending.
    pub edges: Vec<EdgeId>,
    /// Ascending.
    pub facilities: Vec<VertexId>,
    /// Facility serving each client; `None` for unsatisfied clients and for
    /// non-facility problems.
    pub assignment: Vec<Option<VertexId>>,
    pub satisfied: Vec<bool>,
    /// Edge cost, or opening plus connection cost.
    pub element_cost: T,
    pub penalty_cost: Extended<T>,
    pub objective: Extended<T>,
    pub declared_gamma: u32,
}

impl<T: Scalar> PcSolution<T> {
    /// Prices a candidate. Satisfaction is derived from the elements: a
    /// terminal is satisfied when connected to the root, a pair when its
    /// endpoints are connected, a client when assigned to an open facility.
    pub fn build(
        graph: &WeightedGraph<T>,
        inst: &PenaltyInstance<T>,
        mut edges: Vec<EdgeId>,
        mut facilities: Vec<VertexId>,
        assignment: Vec<Option<VertexId>>,
        declared_gamma: u32,
    ) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        facilities.sort_unstable();
        facilities.dedup();
        let n = inst.demands.len();
        let mut satisfied = vec![false; n];
        let mut element_cost = graph.edge_set_cost(&edges);
        let mut assigned = vec![None; n];
        match inst.kind {
            DemandKind::Terminal | DemandKind::TerminalPair => {
                if !facilities.is_empty() {
                    return input("network solution with facilities");
                }
                let mut uf = UnionFind::from_edges(graph, &edges);
                for (i, d) in inst.demands.iter().enumerate() {
                    satisfied[i] = match *d {
                        Demand::Terminal(v) => uf.same(v, inst.root.unwrap()),
                        Demand::TerminalPair { s, t, .. } => uf.same(s, t),
                        Demand::Client(_) => unreachable!(),
                    };
                }
            }
            DemandKind::Client => {
                if !edges.is_empty() {
                    return input("facility solution with edges");
                }
                if assignment.len() != n {
                    return input(format!("{} assignments for {n} clients", assignment.len()));
                }
                for &f in &facilities {
                    match graph.facility_cost(f) {
                        Some(c) => element_cost = element_cost + c.clone(),
                        None => return input(format!("vertex {f} cannot host a facility")),
                    }
                }
                let metric = graph.metric();
                for (i, (d, a)) in inst.demands.iter().zip(&assignment).enumerate() {
                    let Some(f) = *a else { continue };
                    if facilities.binary_search(&f).is_err() {
                        return input(format!("client {i} assigned to closed facility {f}"));
                    }
                    let Demand::Client(v) = *d else { unreachable!() };
                    match metric.distance(v, f)? {
                        Extended::Finite(dist) => element_cost = element_cost + dist,
                        Extended::Infinite => return input(format!("client {i} cannot reach facility {f}")),
                    }
                    satisfied[i] = true;
                    assigned[i] = Some(f);
                }
            }
        }
        let unsatisfied = satisfied.iter().filter(|s| !**s).count();
        let penalty_cost = inst.penalty_for(unsatisfied);
        let objective = penalty_cost.add_finite(&element_cost);
        Ok(PcSolution {
            edges,
            facilities,
            assignment: assigned,
            satisfied,
            element_cost,
            penalty_cost,
            objective,
            declared_gamma,
        })
    }

    /// Serves nothing.
    pub fn empty(graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>, declared_gamma: u32) -> Result<Self> {
        // terminals at the root and pairs with s == t are satisfied for free.
        Self::build(graph, inst, Vec::new(), Vec::new(), vec![None; inst.len()], declared_gamma)
    }

    pub fn unsatisfied_count(&self) -> usize {
        self.satisfied.iter().filter(|s| !**s).count()
    }

    pub fn unsatisfied(&self) -> Vec<usize> {
        (0..self.satisfied.len()).filter(|&i| !self.satisfied[i]).collect()
    }

    /// Errors unless the stored figures match a fresh pricing.
    pub fn verify(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<()> {
        let fresh = Self::build(
            graph,
            inst,
            self.edges.clone(),
            self.facilities.clone(),
            self.assignment.clone(),
            self.declared_gamma,
        )?;
        if fresh != *self {
            return Err(Error::Solver(format!(
                "solution reports objective {} but reprices to {}",
                self.objective, fresh.objective
            )));
        }
        Ok(())
    }

    /// The cheaper of two candidates; ties keep `self`.
    pub(crate) fn better(self, other: Self) -> Self {
        if other.objective < self.objective {
            other
        } else {
            self
        }
    }
}

/// Offline prize-collecting solver with approximation factor `gamma`.
pub trait PrizeCollectingSolver<T: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;
    fn gamma(&self) -> u32;
    fn solve(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<PcSolution<T>>;
}

/// A solver with its declared `gamma` replaced, so Partial scans with a
/// different factor.
pub struct WithGamma<S> {
    pub inner: S,
    pub gamma: u32,
}

impl<T: Scalar, S: PrizeCollectingSolver<T>> PrizeCollectingSolver<T> for WithGamma<S> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn gamma(&self) -> u32 {
        self.gamma
    }

    fn solve(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<PcSolution<T>> {
        let mut sol = self.inner.solve(graph, inst)?;
        sol.declared_gamma = self.gamma;
        Ok(sol)
    }
}

impl<T: Scalar> PrizeCollectingSolver<T> for Box<dyn PrizeCollectingSolver<T>> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn gamma(&self) -> u32 {
        (**self).gamma()
    }

    fn solve(&self, graph: &WeightedGraph<T>, inst: &PenaltyInstance<T>) -> Result<PcSolution<T>> {
        (**self).solve(graph, inst)
    }
}

/// The default approximate solver for a demand kind.
pub fn default_solver<T: Scalar>(kind: DemandKind) -> Box<dyn PrizeCollectingSolver<T>> {
    match kind {
        DemandKind::Terminal => Box::new(GoemansWilliamsonTree),
        DemandKind::TerminalPair => Box::new(LpRoundedForest),
        DemandKind::Client => Box::new(PrimalDualFacility),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    #[test]
    fn pricing_counts_penalties() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(2)).unwrap();
        g.add_edge(1, 2, q(3)).unwrap();
        let inst = PenaltyInstance::new(
            &g,
            DemandKind::Terminal,
            vec![Demand::Terminal(1), Demand::Terminal(2), Demand::Terminal(0)],
            Extended::Finite(q(4)),
            Some(0),
        )
        .unwrap();
        let s = PcSolution::build(&g, &inst, vec![0], vec![], vec![None; 3], 2).unwrap();
        assert_eq!(s.satisfied, vec![true, false, true]);
        assert_eq!(s.objective, Extended::Finite(q(6)));
        s.verify(&g, &inst).unwrap();
        let mut wrong = s.clone();
        wrong.objective = Extended::Finite(q(5));
        assert!(wrong.verify(&g, &inst).is_err());
    }

    #[test]
    fn infinite_penalty_only_when_unserved() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(1)).unwrap();
        let inst =
            PenaltyInstance::new(&g, DemandKind::TerminalPair, vec![Demand::pair(0, 1)], Extended::Infinite, None)
                .unwrap();
        assert_eq!(PcSolution::empty(&g, &inst, 1).unwrap().objective, Extended::Infinite);
        let s = PcSolution::build(&g, &inst, vec![0], vec![], vec![None], 1).unwrap();
        assert_eq!(s.objective, Extended::Finite(q(1)));
    }

    #[test]
    fn facility_pricing_includes_connection() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(3)).unwrap();
        g.set_facility_cost(1, Some(q(2))).unwrap();
        let inst = PenaltyInstance::new(
            &g,
            DemandKind::Client,
            vec![Demand::Client(0), Demand::Client(1)],
            Extended::Finite(q(10)),
            None,
        )
        .unwrap();
        let s = PcSolution::build(&g, &inst, vec![], vec![1], vec![Some(1), Some(1)], 3).unwrap();
        assert_eq!(s.element_cost, q(5));
        assert!(PcSolution::build(&g, &inst, vec![], vec![], vec![Some(1), None], 3).is_err());
    }

    #[test]
    fn with_gamma_overrides_only_the_factor() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(1)).unwrap();
        g.add_edge(1, 2, q(1)).unwrap();
        let inst = PenaltyInstance::new(
            &g,
            DemandKind::Terminal,
            vec![Demand::Terminal(2)],
            Extended::Finite(q(5)),
            Some(0),
        )
        .unwrap();
        let base = GoemansWilliamsonTree.solve(&g, &inst).unwrap();
        let w = WithGamma { inner: GoemansWilliamsonTree, gamma: 7 };
        assert_eq!(PrizeCollectingSolver::<Q>::gamma(&w), 7);
        let s = w.solve(&g, &inst).unwrap();
        assert_eq!(s.declared_gamma, 7);
        assert_eq!(s.objective, base.objective);
        assert_eq!(s.satisfied, base.satisfied);
    }
}
