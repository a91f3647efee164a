//! Fotakis' deterministic online facility location, with the amortized
//! cost used as the charged cost.

use super::{wrong_kind, OnlineEngine, ServeRecord};
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph, ZeroCostOverlay};
use crate::request::{Demand, DemandKind};
use crate::scalar::{Extended, Scalar};

pub struct Fotakis<'g, T> {
    graph: &'g WeightedGraph<T>,
    overlay: ZeroCostOverlay,
    sites: Vec<VertexId>,
    /// Opening cost per site under the overlay.
    site_costs: Vec<T>,
    potential: Vec<T>,
    open: Vec<usize>,
    /// Distance rows of the live clients, restricted to sites.
    client_rows: Vec<Vec<Extended<T>>>,
    /// `d(F, r)` per live client.
    client_gap: Vec<Extended<T>>,
    potential_violations: usize,
    log: Vec<ServeRecord<T>>,
}

impl<'g, T: Scalar> Fotakis<'g, T> {
    pub fn new(graph: &'g WeightedGraph<T>, overlay: ZeroCostOverlay) -> Result<Self> {
        if !graph.has_facility_data() {
            return Err(Error::Configuration("facility location needs facility costs".into()));
        }
        let sites = graph.facility_sites();
        if sites.is_empty() {
            return Err(Error::Configuration("no vertex admits a facility".into()));
        }
        let metric = graph.metric().with_overlay(&overlay);
        let site_costs = sites.iter().map(|&v| metric.facility_cost(v).unwrap()).collect();
        Ok(Fotakis {
            graph,
            potential: vec![T::zero(); sites.len()],
            sites,
            site_costs,
            overlay,
            open: Vec::new(),
            client_rows: Vec::new(),
            client_gap: Vec::new(),
            potential_violations: 0,
            log: Vec::new(),
        })
    }

    pub fn open_facilities(&self) -> Vec<VertexId> {
        self.open.iter().map(|&i| self.sites[i]).collect()
    }

    /// `(site, potential, opening cost)` per candidate site.
    pub fn potentials(&self) -> Vec<(VertexId, T, T)> {
        (0..self.sites.len())
            .map(|i| (self.sites[i], self.potential[i].clone(), self.site_costs[i].clone()))
            .collect()
    }

    /// Iterations after which some potential exceeded its opening cost.
    pub fn potential_violations(&self) -> usize {
        self.potential_violations
    }

    fn recompute_potentials(&mut self) {
        for i in 0..self.sites.len() {
            let mut p = T::zero();
            for (row, gap) in self.client_rows.iter().zip(&self.client_gap) {
                p = p + surplus(gap, &row[i]);
            }
            self.potential[i] = p;
        }
    }

    fn open_site(&mut self, i: usize) {
        self.open.push(i);
        for (row, gap) in self.client_rows.iter().zip(self.client_gap.iter_mut()) {
            if row[i] < *gap {
                *gap = row[i].clone();
            }
        }
    }
}

/// `(gap - d)+` where an infinite gap only arises before any facility opens.
fn surplus<T: Scalar>(gap: &Extended<T>, d: &Extended<T>) -> T {
    match (gap, d) {
        (Extended::Finite(g), Extended::Finite(d)) => (g.clone() - d.clone()).positive_part(),
        _ => T::zero(),
    }
}

impl<T: Scalar> OnlineEngine<T> for Fotakis<'_, T> {
    fn demand_kind(&self) -> DemandKind {
        DemandKind::Client
    }

    fn serve(&mut self, demand: &Demand) -> Result<ServeRecord<T>> {
        let Demand::Client(r) = *demand else { return wrong_kind("Fotakis", demand) };
        self.graph.check_vertex(r)?;
        let full = self.graph.metric().with_overlay(&self.overlay).distances_from(r)?;
        let row: Vec<Extended<T>> = self.sites.iter().map(|&v| full[v].clone()).collect();
        let gap = self
            .open
            .iter()
            .map(|&i| row[i].clone())
            .fold(Extended::Infinite, Extended::min);

        // amortized cost from the state before this client
        let mut cheapest_open: Extended<T> = Extended::Infinite;
        for i in 0..self.sites.len() {
            let cand = row[i].add_finite(&(self.site_costs[i].clone() - self.potential[i].clone()));
            cheapest_open = cheapest_open.min(cand);
        }
        let alpha = match gap.clone().min(cheapest_open) {
            Extended::Finite(a) => a.clone() + a,
            Extended::Infinite => {
                return Err(Error::Infeasible(format!("client {r} cannot reach any facility site")))
            }
        };

        let mut record = ServeRecord::free();
        // no open facility reachable, e.g. before the first opening
        if !gap.is_finite() {
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.sites.len() {
                if let Some(d) = row[i].finite() {
                    let c = self.site_costs[i].clone() + d.clone();
                    if best.as_ref().map_or(true, |(_, b)| c < *b) {
                        best = Some((i, c));
                    }
                }
            }
            let (w, _) = best.expect("reachable site exists");
            self.client_rows.push(row);
            self.client_gap.push(Extended::Infinite);
            self.open_site(w);
            self.recompute_potentials();
            record.opened_facilities.push(self.sites[w]);
            record.actual = self.site_costs[w].clone();
        } else {
            for i in 0..self.sites.len() {
                let inc = surplus(&gap, &row[i]);
                self.potential[i] = self.potential[i].clone() + inc;
            }
            self.client_rows.push(row);
            self.client_gap.push(gap);
            let mut w = 0;
            for i in 1..self.sites.len() {
                let a = self.potential[i].clone() - self.site_costs[i].clone();
                let b = self.potential[w].clone() - self.site_costs[w].clone();
                if a > b {
                    w = i;
                }
            }
            if self.potential[w] > self.site_costs[w] {
                self.open_site(w);
                self.recompute_potentials();
                record.opened_facilities.push(self.sites[w]);
                record.actual = self.site_costs[w].clone();
            }
        }
        // connect to the nearest open facility (smallest site index on ties)
        let last = self.client_rows.len() - 1;
        let mut best: Option<usize> = None;
        for &i in &self.open {
            let d = &self.client_rows[last][i];
            if best.map_or(true, |b| *d < self.client_rows[last][b] || (*d == self.client_rows[last][b] && i < b)) {
                best = Some(i);
            }
        }
        let c = best.unwrap();
        let connection = self.client_rows[last][c].finite().expect("open facility reachable").clone();
        record.connected_to = Some(self.sites[c]);
        record.connection_cost = connection.clone();
        record.actual = record.actual + connection;
        record.charged = alpha;
        if (0..self.sites.len()).any(|i| self.potential[i] > self.site_costs[i]) {
            self.potential_violations += 1;
        }
        self.log.push(record.clone());
        Ok(record)
    }

    fn log(&self) -> &[ServeRecord<T>] {
        &self.log
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
    fn first_client_opens_cheapest_reachable() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(1, 1)).unwrap();
        g.set_facility_cost(1, Some(q(1, 2))).unwrap();
        let mut e = Fotakis::new(&g, ZeroCostOverlay::new(&g)).unwrap();
        let r = e.serve(&Demand::Client(0)).unwrap();
        assert_eq!(r.actual, q(3, 2));
        assert_eq!(r.charged, q(3, 1));
        assert_eq!(r.opened_facilities, vec![1]);
        assert_eq!(e.potential_violations(), 0);
    }

    #[test]
    fn colocated_client_is_free() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(3, 1)).unwrap();
        g.set_facility_cost(0, Some(q(2, 1))).unwrap();
        let mut e = Fotakis::new(&g, ZeroCostOverlay::new(&g)).unwrap();
        e.serve(&Demand::Client(0)).unwrap();
        let r = e.serve(&Demand::Client(0)).unwrap();
        assert_eq!((r.actual, r.charged), (q(0, 1), q(0, 1)));
    }

    #[test]
    fn potential_opens_second_facility_strictly() {
        // far site 1 at distance 4 with f = 1; clients keep arriving at 1
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(4, 1)).unwrap();
        g.set_facility_cost(0, Some(q(0, 1))).unwrap();
        g.set_facility_cost(1, Some(q(4, 1))).unwrap();
        let mut e = Fotakis::new(&g, ZeroCostOverlay::new(&g)).unwrap();
        e.serve(&Demand::Client(0)).unwrap();
        // potential at 1 becomes exactly 4 = f: not strictly above, no opening
        let r = e.serve(&Demand::Client(1)).unwrap();
        assert!(r.opened_facilities.is_empty());
        assert_eq!(r.actual, q(4, 1));
        let r = e.serve(&Demand::Client(1)).unwrap();
        assert_eq!(r.opened_facilities, vec![1]);
        assert_eq!(e.potential_violations(), 0);
        assert!(e.total_charged() >= e.total_actual());
    }

    #[test]
    fn isolated_client_opens_its_own_facility() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, q(1, 1)).unwrap();
        g.set_facility_cost(0, Some(q(1, 1))).unwrap();
        g.set_facility_cost(2, Some(q(0, 1))).unwrap();
        let mut e = Fotakis::new(&g, ZeroCostOverlay::new(&g)).unwrap();
        e.serve(&Demand::Client(1)).unwrap();
        let r = e.serve(&Demand::Client(2)).unwrap();
        assert_eq!(r.opened_facilities, vec![2]);
        assert_eq!(r.actual, q(0, 1));
        assert!(e.total_charged() >= e.total_actual());
    }

    #[test]
    fn needs_facility_data() {
        let g: WeightedGraph<Q> = WeightedGraph::new(1);
        assert!(matches!(Fotakis::new(&g, ZeroCostOverlay::new(&g)), Err(Error::Configuration(_))));
    }
}
