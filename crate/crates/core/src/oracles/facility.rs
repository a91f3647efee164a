//! Exact facility location by enumerating sets of open facilities, and the
//! soft-capacitated variant by enumerating facility multiplicities.

use super::apsp::AllPairs;
use super::OracleBudget;
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::matching::matching_ladder;
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct FacilitySolution<T> {
    pub opening_cost: T,
    pub connection_cost: T,
    pub cost: T,
    /// Open sites, ascending.
    pub facilities: Vec<VertexId>,
    /// Site serving each client.
    pub assignment: Vec<VertexId>,
}

/// Client-to-site distances for every candidate site.
pub struct FacilityEnumeration<T> {
    pub sites: Vec<VertexId>,
    pub site_costs: Vec<T>,
    /// `dist[j][s]`: client `j` to site `s`.
    pub dist: Vec<Vec<Extended<T>>>,
    /// Site indices sorted by distance from each client (ties by index).
    order: Vec<Vec<usize>>,
}

impl<T: Scalar> FacilityEnumeration<T> {
    pub fn new(graph: &WeightedGraph<T>, clients: &[VertexId]) -> Result<Self> {
        if !graph.has_facility_data() {
            return Err(Error::Configuration("graph has no facility costs".into()));
        }
        let sites = graph.facility_sites();
        let limit = OracleBudget::DEFAULT.max_facilities;
        if sites.len() > limit {
            return Err(Error::OverBudget { what: "facility sites", limit, actual: sites.len() });
        }
        for &c in clients {
            graph.check_vertex(c)?;
        }
        let apsp = AllPairs::new(graph, 1);
        let site_costs = sites.iter().map(|&s| graph.facility_cost(s).unwrap().clone()).collect();
        let dist: Vec<Vec<Extended<T>>> =
            clients.iter().map(|&c| sites.iter().map(|&s| apsp.d(c, s).clone()).collect()).collect();
        let order = dist
            .iter()
            .map(|row| {
                let mut idx: Vec<usize> = (0..sites.len()).collect();
                idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
                idx
            })
            .collect();
        Ok(FacilityEnumeration { sites, site_costs, dist, order })
    }

    /// Calls `visit(mask, opening cost, nearest site per client)` for every
    /// nonempty site subset, in increasing mask order.
    pub fn for_each_subset(&self, mut visit: impl FnMut(usize, &T, &[(usize, Extended<T>)])) {
        let k = self.sites.len();
        let mut opening = vec![T::zero(); 1 << k];
        let mut nearest: Vec<(usize, Extended<T>)> = Vec::with_capacity(self.dist.len());
        for mask in 1usize..(1 << k) {
            let low = mask.trailing_zeros() as usize;
            opening[mask] = opening[mask & (mask - 1)].clone() + self.site_costs[low].clone();
            nearest.clear();
            for (j, ord) in self.order.iter().enumerate() {
                let s = *ord.iter().find(|&&s| mask & (1 << s) != 0).unwrap();
                nearest.push((s, self.dist[j][s].clone()));
            }
            visit(mask, &opening[mask], &nearest);
        }
    }

    fn solution(&self, mask: usize, opening: T, nearest: &[(usize, Extended<T>)]) -> FacilitySolution<T> {
        let connection = nearest.iter().fold(T::zero(), |acc, (_, d)| acc + d.finite().unwrap().clone());
        FacilitySolution {
            cost: opening.clone() + connection.clone(),
            opening_cost: opening,
            connection_cost: connection,
            facilities: (0..self.sites.len()).filter(|s| mask & (1 << s) != 0).map(|s| self.sites[s]).collect(),
            assignment: nearest.iter().map(|(s, _)| self.sites[*s]).collect(),
        }
    }
}

/// Minimum of opening plus connection cost over all sets of open sites.
pub fn exact_facility_location<T: Scalar>(graph: &WeightedGraph<T>, clients: &[VertexId]) -> Result<FacilitySolution<T>> {
    let en = FacilityEnumeration::new(graph, clients)?;
    if clients.is_empty() {
        return Ok(FacilitySolution {
            opening_cost: T::zero(),
            connection_cost: T::zero(),
            cost: T::zero(),
            facilities: Vec::new(),
            assignment: Vec::new(),
        });
    }
    let mut best: Option<(T, usize, Vec<(usize, Extended<T>)>, T)> = None;
    en.for_each_subset(|mask, opening, nearest| {
        let Some(total) = nearest.iter().try_fold(opening.clone(), |acc, (_, d)| d.finite().map(|d| acc + d.clone())) else {
            return;
        };
        if best.as_ref().map_or(true, |(b, ..)| total < *b) {
            best = Some((total, mask, nearest.to_vec(), opening.clone()));
        }
    });
    match best {
        Some((_, mask, nearest, opening)) => Ok(en.solution(mask, opening, &nearest)),
        None => Err(Error::Infeasible("some client cannot reach any facility".into())),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacitatedSolution<T> {
    pub cost: T,
    /// `(site, number of copies)` for every site with at least one copy.
    pub copies: Vec<(VertexId, u64)>,
    pub assignment: Vec<VertexId>,
}

/// Soft-capacitated optimum: each copy at `v` costs `f_v` and serves at most
/// `capacity(v)` clients; a site without capacity data is uncapacitated.
pub fn exact_capacitated_fl<T: Scalar>(graph: &WeightedGraph<T>, clients: &[VertexId]) -> Result<CapacitatedSolution<T>> {
    let en = FacilityEnumeration::new(graph, clients)?;
    let k = clients.len();
    if k > OracleBudget::DEFAULT.max_terminals {
        return Err(Error::OverBudget { what: "clients", limit: OracleBudget::DEFAULT.max_terminals, actual: k });
    }
    if k == 0 {
        return Ok(CapacitatedSolution { cost: T::zero(), copies: Vec::new(), assignment: Vec::new() });
    }
    // A site never needs more copies than it would take to serve everyone.
    let caps: Vec<Option<u64>> = en.sites.iter().map(|&s| graph.capacity(s)).collect();
    let max_copies: Vec<u64> = caps.iter().map(|c| c.map_or(1, |b| (k as u64).div_ceil(b))).collect();
    let mut counts = vec![0u64; en.sites.len()];
    let mut best: Option<CapacitatedSolution<T>> = None;
    loop {
        let seats: Vec<usize> = counts
            .iter()
            .zip(&caps)
            .enumerate()
            .flat_map(|(s, (&c, cap))| {
                let n = if c == 0 { 0 } else { cap.map_or(k as u64, |b| c * b).min(k as u64) };
                std::iter::repeat(s).take(n as usize)
            })
            .collect();
        if seats.len() >= k {
            let opening = counts
                .iter()
                .zip(&en.site_costs)
                .fold(T::zero(), |acc, (&c, f)| acc + f.clone() * T::from_count(c as usize));
            if best.as_ref().map_or(true, |b| opening < b.cost) {
                let matrix: Vec<Vec<Extended<T>>> =
                    (0..k).map(|j| seats.iter().map(|&s| en.dist[j][s].clone()).collect()).collect();
                let ladder = matching_ladder(&matrix)?;
                if let Some(m) = ladder.get(k) {
                    let cost = opening + m.cost.clone();
                    if best.as_ref().map_or(true, |b| cost < b.cost) {
                        best = Some(CapacitatedSolution {
                            cost,
                            copies: counts
                                .iter()
                                .enumerate()
                                .filter(|(_, &c)| c > 0)
                                .map(|(s, &c)| (en.sites[s], c))
                                .collect(),
                            assignment: m.pairs.iter().map(|&(_, seat)| en.sites[seats[seat]]).collect(),
                        });
                    }
                }
            }
        }
        // next multiplicity vector in lexicographic order
        let mut i = 0;
        loop {
            if i == counts.len() {
                return best.ok_or_else(|| Error::Infeasible("clients cannot all be served".into()));
            }
            if counts[i] < max_copies[i] {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}
