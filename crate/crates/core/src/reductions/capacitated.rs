//! Soft capacities: every facility site `v` moves to a pendant copy `v'`
//! behind a bridge of cost `f_v / beta_v`, and the uncapacitated solution
//! on the new graph is replayed with as many copies as the load needs.

use crate::error::{input, Error, Result};
use crate::framework::{run_with_predictions, standard_engine, RunReport};
use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::instance::InstanceFile;
use crate::prize_collecting::PrizeCollectingSolver;
use crate::request::{Demand, DemandKind, PredictionSet, Request};
use crate::scalar::{Extended, Scalar};
use num_integer::Integer;

#[derive(Clone, Debug)]
pub struct CapacitatedReduction<T> {
    pub transformed: WeightedGraph<T>,
    pub original_vertices: usize,
    /// `copy[v]` for every facility site `v` of the original graph.
    pub copy: Vec<Option<VertexId>>,
    /// Transformed vertex to the original site it copies.
    pub copy_of: Vec<Option<VertexId>>,
    pub bridges: Vec<EdgeId>,
}

impl<T: Scalar> CapacitatedReduction<T> {
    /// Original site behind a transformed facility.
    pub fn site(&self, transformed: VertexId) -> Option<VertexId> {
        self.copy_of.get(transformed).copied().flatten()
    }
}

/// Builds the transformed instance. Sites keep no facility of their own;
/// only their copies can open.
pub fn capacitate_reduce<T: Scalar>(graph: &WeightedGraph<T>) -> Result<CapacitatedReduction<T>> {
    if !graph.has_facility_data() {
        return Err(Error::Configuration("graph has no facility costs".into()));
    }
    let n = graph.vertex_count();
    let sites = graph.facility_sites();
    let mut g = graph.clone();
    let mut copy = vec![None; n];
    let mut copy_of = vec![None; n];
    let mut bridges = Vec::with_capacity(sites.len());
    for &v in &sites {
        let beta = graph.capacity(v).ok_or_else(|| Error::Input(format!("facility site {v} has no capacity")))?;
        let f = graph.facility_cost(v).unwrap().clone();
        g.set_facility_cost(v, None)?;
        let c = g.add_vertex();
        g.set_facility_cost(c, Some(f.clone()))?;
        bridges.push(g.add_edge(v, c, f / T::from_count(beta as usize))?);
        copy[v] = Some(c);
        copy_of.push(Some(v));
    }
    Ok(CapacitatedReduction { transformed: g, original_vertices: n, copy, copy_of, bridges })
}

/// Multiplies the file's scale by the lcm of all capacities so every
/// bridge cost `f_v / beta_v` is again an integer multiple of the unit.
pub fn lcm_capacity_scale(file: &InstanceFile) -> Result<InstanceFile> {
    let l = file.capacities.iter().flatten().fold(1u64, |acc, &[_, b]| acc.lcm(&b.max(1)));
    let mul = |x: u64| x.checked_mul(l).ok_or_else(|| Error::Input(format!("scaling {x} by {l} overflows")));
    let mut out = file.clone();
    out.scale_denominator = mul(file.scale_denominator)?;
    for e in &mut out.edges {
        e[2] = mul(e[2])?;
    }
    if let Some(fc) = &mut out.facility_costs {
        for f in fc.iter_mut() {
            f[1] = mul(f[1])?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacitatedPlayback<T> {
    pub opening_cost: T,
    pub connection_cost: T,
    pub cost: T,
    /// `(site, copies)` for every site with at least one copy, ascending.
    pub copies: Vec<(VertexId, u64)>,
    /// Site serving each connection, in order.
    pub assignment: Vec<VertexId>,
}

/// Replays openings and connections made on the transformed graph. An
/// opening at `v'` opens the first copy at `v`; a connection to `v'` uses
/// `v`, opening another copy when the current ones are full.
pub fn capacitate_playback<T: Scalar>(
    graph: &WeightedGraph<T>,
    reduction: &CapacitatedReduction<T>,
    opened: &[VertexId],
    connections: &[(VertexId, VertexId)],
) -> Result<CapacitatedPlayback<T>> {
    let n = reduction.original_vertices;
    let mut copies = vec![0u64; n];
    let mut load = vec![0u64; n];
    let site = |f: VertexId| {
        reduction.site(f).ok_or_else(|| Error::Input(format!("vertex {f} is not a facility copy")))
    };
    for &f in opened {
        let v = site(f)?;
        copies[v] = copies[v].max(1);
    }
    let metric = graph.metric();
    let mut connection_cost = T::zero();
    let mut assignment = Vec::with_capacity(connections.len());
    for &(client, f) in connections {
        let v = site(f)?;
        let beta = graph.capacity(v).unwrap();
        if load[v] == copies[v] * beta {
            copies[v] += 1;
        }
        load[v] += 1;
        match metric.distance(client, v)? {
            Extended::Finite(d) => connection_cost = connection_cost + d,
            Extended::Infinite => return input(format!("client {client} cannot reach site {v}")),
        }
        assignment.push(v);
    }
    let mut opening_cost = T::zero();
    let mut list = Vec::new();
    for v in 0..n {
        if copies[v] > 0 {
            opening_cost = opening_cost + graph.facility_cost(v).unwrap().clone() * T::from_count(copies[v] as usize);
            list.push((v, copies[v]));
        }
    }
    Ok(CapacitatedPlayback {
        cost: opening_cost.clone() + connection_cost.clone(),
        opening_cost,
        connection_cost,
        copies: list,
        assignment,
    })
}

#[derive(Clone, Debug)]
pub struct CapacitatedRun<T> {
    pub reduction: CapacitatedReduction<T>,
    /// The framework on the transformed graph; its total is `ALG'`.
    pub transformed: RunReport<T>,
    pub playback: CapacitatedPlayback<T>,
}

impl<T: Scalar> CapacitatedRun<T> {
    /// `ALG <= ALG'`.
    pub fn playback_within(&self) -> bool {
        self.playback.cost <= self.transformed.total_cost
    }
}

/// Framework with predictions on the transformed graph, replayed.
pub fn capacitated_run<T: Scalar>(
    graph: &WeightedGraph<T>,
    requests: &[Request],
    predictions: &PredictionSet,
    solver: &dyn PrizeCollectingSolver<T>,
) -> Result<CapacitatedRun<T>> {
    let reduction = capacitate_reduce(graph)?;
    let g = &reduction.transformed;
    let report =
        run_with_predictions(g, DemandKind::Client, None, requests, predictions, solver, standard_engine(g, DemandKind::Client, None))?;
    let connections: Vec<(VertexId, VertexId)> = requests
        .iter()
        .zip(&report.trace)
        .map(|(r, rec)| match (&r.demand, rec.connected_to) {
            (Demand::Client(c), Some(f)) => Ok((*c, f)),
            _ => Err(Error::Solver(format!("request {} left unconnected", r.arrival_index))),
        })
        .collect::<Result<_>>()?;
    let playback = capacitate_playback(graph, &reduction, &report.facilities, &connections)?;
    Ok(CapacitatedRun { reduction, transformed: report, playback })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prize_collecting::PrimalDualFacility;
    use crate::request::sequence;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn single(f: i64, beta: u64) -> WeightedGraph<Q> {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, q(1)).unwrap();
        g.set_facility_cost(0, Some(q(f))).unwrap();
        g.set_capacity(0, beta).unwrap();
        g
    }

    #[test]
    fn bridge_cost() {
        let red = capacitate_reduce(&single(6, 3)).unwrap();
        let g = &red.transformed;
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge(red.bridges[0]).cost, q(2));
        assert_eq!(g.facility_cost(2), Some(&q(6)));
        assert_eq!(g.facility_cost(0), None);
        let red = capacitate_reduce(&single(6, 1)).unwrap();
        assert_eq!(red.transformed.edge(red.bridges[0]).cost, q(6));
    }

    #[test]
    fn distances_between_originals_unchanged() {
        let mut g = single(4, 2);
        g.add_vertex();
        g.add_edge(1, 2, q(3)).unwrap();
        g.set_facility_cost(2, Some(q(1))).unwrap();
        g.set_capacity(2, 5).unwrap();
        let red = capacitate_reduce(&g).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(g.metric().distance(u, v).unwrap(), red.transformed.metric().distance(u, v).unwrap());
            }
        }
    }

    #[test]
    fn missing_capacity() {
        let mut g = WeightedGraph::new(1);
        g.set_facility_cost(0, Some(q(1))).unwrap();
        assert!(capacitate_reduce(&g).is_err());
    }

    #[test]
    fn playback_opens_copies() {
        let g = single(6, 2);
        let red = capacitate_reduce(&g).unwrap();
        let p = capacitate_playback(&g, &red, &[2], &[(0, 2), (0, 2), (1, 2)]).unwrap();
        assert_eq!(p.copies, vec![(0, 2)]);
        assert_eq!(p.cost, q(13));
        let p = capacitate_playback(&g, &red, &[], &[]).unwrap();
        assert!(p.copies.is_empty());
        assert_eq!(p.cost, q(0));
    }

    #[test]
    fn lcm_scale() {
        let g = single(6, 4);
        let file = InstanceFile::from_graph(&g, None, Some(1)).unwrap();
        let scaled = lcm_capacity_scale(&file).unwrap();
        assert_eq!(scaled.scale_denominator, 4);
        let back: WeightedGraph<Q> = scaled.to_graph().unwrap();
        let red = capacitate_reduce(&back).unwrap();
        let t = InstanceFile::from_graph(&red.transformed, None, Some(4)).unwrap();
        assert_eq!(t.edges[1][2], 6);
    }

    #[test]
    fn run_replays_within() {
        let g = single(2, 1);
        let reqs = sequence([Demand::Client(0), Demand::Client(1), Demand::Client(0)]);
        let run = capacitated_run(&g, &reqs, &PredictionSet::from_requests(&reqs), &PrimalDualFacility).unwrap();
        assert!(run.playback_within(), "{} > {}", run.playback.cost, run.transformed.total_cost);
        assert_eq!(run.playback.copies, vec![(0, 3)]);
    }
}
