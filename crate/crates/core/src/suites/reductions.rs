use super::{par_tally, Options, Outcome, Tally};
use crate::error::Result;
use crate::generators::{add_capacities, add_facilities, random_demands, random_graph, with_priorities};
use crate::graph::WeightedGraph;
use crate::oracles::{exact_capacitated_fl, exact_facility_location};
use crate::perturb::Perturbation;
use crate::prize_collecting::PrimalDualFacility;
use crate::reductions::{capacitate_reduce, capacitated_run, split_by_priority};
use crate::request::{sequence, Demand, DemandKind, PredictionSet, Request};
use crate::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Capacitated instance: at most `max_sites` sites with capacities in
/// `1..=3`, and up to `max_clients` clients.
fn capacitated(seed: u64, max_sites: usize, max_clients: usize) -> Result<(WeightedGraph<Exact>, Vec<Request>, PredictionSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=8usize);
    let extra = rng.gen_range(0..=4);
    let mut g = random_graph(&mut rng, n, extra, 9);
    add_facilities(&mut rng, &mut g, 1, 16, 0.5);
    for v in g.facility_sites().into_iter().skip(max_sites) {
        g.set_facility_cost(v, None)?;
    }
    add_capacities(&mut rng, &mut g, 3);
    let k = rng.gen_range(1..=max_clients);
    let requests = sequence(random_demands(&mut rng, &g, DemandKind::Client, k, 1)?);
    let pert = Perturbation { drop_rate: 0.25, add_rate: 0.25, displacement_radius: 3.0, seed: rng.gen() };
    let predictions = pert.apply(&g, &requests)?;
    Ok((g, requests, predictions))
}

fn clients(requests: &[Request]) -> Vec<usize> {
    requests.iter().flat_map(|r| r.demand.vertices()).collect()
}

pub fn distance_preservation(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let (g, _, _) = capacitated(opts.seed_for(50, i), 7, 6)?;
        let red = capacitate_reduce(&g)?;
        let before = g.metric();
        let after = red.transformed.metric();
        let mut t = Tally::default();
        for u in 0..g.vertex_count() {
            let a = before.distances_from(u)?;
            let b = after.distances_from(u)?;
            for v in 0..g.vertex_count() {
                t.check(a[v] == b[v], || format!("instance {i}: d({u},{v}) {} became {}", a[v], b[v]));
            }
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("capacitated_distance_preservation", t, ""))
}

/// The replayed capacitated solution costs no more than the framework on
/// the transformed graph.
pub fn playback(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let (g, requests, predictions) = capacitated(opts.seed_for(51, i), 7, 10)?;
        let run = capacitated_run(&g, &requests, &predictions, &PrimalDualFacility)?;
        let mut t = Tally::default();
        t.check(run.playback_within(), || {
            format!("instance {i}: ALG {} > ALG' {}", run.playback.cost, run.transformed.total_cost)
        });
        Ok(t)
    })?;
    Ok(Outcome::from_tally("capacitated_playback", t, ""))
}

/// `OPT' <= 2 OPT`: exact uncapacitated optimum on the transformed graph
/// against the exact soft-capacitated optimum.
pub fn opt_ratio(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let (g, requests, _) = capacitated(opts.seed_for(52, i), 4, 6)?;
        let cl = clients(&requests);
        let red = capacitate_reduce(&g)?;
        let transformed = exact_facility_location(&red.transformed, &cl)?.cost;
        let opt = exact_capacitated_fl(&g, &cl)?.cost;
        let mut t = Tally::default();
        t.check(transformed <= Exact::from_integer(2.into()) * opt.clone(), || {
            format!("instance {i}: OPT' {transformed} > 2 x {opt}")
        });
        // replaying OPT' gives a capacitated solution no dearer than OPT'
        t.check(opt <= transformed, || format!("instance {i}: OPT {opt} > OPT' {transformed}"));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("capacitated_opt_ratio", t, ""))
}

fn counted(demands: impl IntoIterator<Item = Demand>) -> Vec<String> {
    let mut v: Vec<String> = demands.into_iter().map(|d| format!("{d:?}")).collect();
    v.sort();
    v
}

pub fn priority_split_lossless(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed_for(53, i));
        let n = rng.gen_range(3..=9);
        let b = rng.gen_range(1..=4);
        let base = random_graph::<Exact, _>(&mut rng, n, 3, 9);
        let g = with_priorities(&mut rng, &base, b);
        let (r, p) = (rng.gen_range(0..=10), rng.gen_range(0..=10));
        let requests = sequence(random_demands(&mut rng, &g, DemandKind::TerminalPair, r, b)?);
        let predictions = PredictionSet::new(random_demands(&mut rng, &g, DemandKind::TerminalPair, p, b)?);
        let split = split_by_priority(&requests, &predictions, b)?;
        let mut t = Tally::default();
        let mut rs = Vec::new();
        let mut ps = Vec::new();
        for (j, (r, p)) in split.iter().enumerate() {
            let ok = r.iter().map(|x| &x.demand).chain(&p.items).all(|d| d.priority() as usize == j + 1);
            t.check(ok, || format!("instance {i}: class {} holds a foreign priority", j + 1));
            rs.extend(r.iter().map(|x| x.demand.clone()));
            ps.extend(p.items.iter().cloned());
        }
        t.check(counted(rs) == counted(requests.iter().map(|r| r.demand.clone())), || format!("instance {i}: requests lost"));
        t.check(counted(ps) == counted(predictions.items.iter().cloned()), || format!("instance {i}: predictions lost"));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("priority_split_lossless", t, ""))
}
