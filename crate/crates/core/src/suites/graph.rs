use super::{par_tally, Options, Outcome, Tally};
use crate::error::Result;
use crate::generators::{add_capacities, add_facilities, random_graph, with_priorities};
use crate::graph::{WeightedGraph, ZeroCostOverlay};
use crate::instance::InstanceFile;
use crate::oracles::apsp::AllPairs;
use crate::scalar::Extended;
use crate::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph(seed: u64) -> (WeightedGraph<Exact>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=12);
    let extra = rng.gen_range(0..=n);
    let g = random_graph(&mut rng, n, extra, 9);
    let g = with_priorities(&mut rng, &g, 3);
    (g, rng)
}

fn random_overlay(rng: &mut ChaCha8Rng, g: &WeightedGraph<Exact>) -> ZeroCostOverlay {
    let mut o = ZeroCostOverlay::new(g);
    for e in 0..g.edge_count() {
        if rng.gen_bool(0.3) {
            o.zero_edge(e);
        }
    }
    o
}

pub fn triangle_inequality(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(30, 120), |i| {
        let (g, mut rng) = graph(opts.seed_for(1, i));
        let overlay = random_overlay(&mut rng, &g);
        let floor = rng.gen_range(1..=3);
        let m = g.metric().with_overlay(&overlay).with_floor(floor);
        let n = g.vertex_count();
        let rows: Vec<Vec<Extended<Exact>>> = (0..n).map(|u| m.distances_from(u)).collect::<Result<_>>()?;
        let mut t = Tally::default();
        for u in 0..n {
            t.check(rows[u][u] == Extended::zero(), || format!("d({u},{u}) != 0"));
            for v in 0..n {
                t.check(rows[u][v] == rows[v][u], || format!("asymmetric d({u},{v})"));
                for w in 0..n {
                    let via = rows[u][v].add(&rows[v][w]);
                    t.check(rows[u][w] <= via, || format!("d({u},{w}) > d({u},{v}) + d({v},{w})"));
                }
            }
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("triangle_inequality", t, ""))
}

pub fn distance_monotonicity(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(30, 120), |i| {
        let (g, mut rng) = graph(opts.seed_for(2, i));
        let small = random_overlay(&mut rng, &g);
        let mut large = small.clone();
        large.extend(&random_overlay(&mut rng, &g));
        let n = g.vertex_count();
        let mut t = Tally::default();
        for u in 0..n {
            let a = g.metric().with_overlay(&small).distances_from(u)?;
            let b = g.metric().with_overlay(&large).distances_from(u)?;
            let plain = g.metric().distances_from(u)?;
            for v in 0..n {
                t.check(b[v] <= a[v] && a[v] <= plain[v], || format!("overlay grew d({u},{v})"));
            }
            let mut prev = plain;
            for floor in 2..=3 {
                let cur = g.metric().with_floor(floor).distances_from(u)?;
                for v in 0..n {
                    t.check(cur[v] >= prev[v], || format!("floor {floor} shrank d({u},{v})"));
                }
                prev = cur;
            }
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("distance_monotonicity", t, ""))
}

pub fn shortest_path_vs_all_pairs(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let (g, mut rng) = graph(opts.seed_for(3, i));
        let floor = rng.gen_range(1..=3);
        let apsp = AllPairs::new(&g, floor);
        let m = g.metric().with_floor(floor);
        let n = g.vertex_count();
        let mut t = Tally::default();
        for u in 0..n {
            for v in 0..n {
                let p = m.shortest_path(u, v)?;
                let ok = p.cost == *apsp.d(u, v)
                    && (!p.cost.is_finite() || Extended::Finite(m.path_cost(&p.edges)) == p.cost);
                t.check(ok, || format!("d({u},{v}) = {} but all-pairs says {}", p.cost, apsp.d(u, v)));
            }
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("shortest_path_vs_all_pairs", t, ""))
}

pub fn instance_round_trip(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(30, 100), |i| {
        let (mut g, mut rng) = graph(opts.seed_for(4, i));
        add_facilities(&mut rng, &mut g, 1, 20, 0.5);
        add_capacities(&mut rng, &mut g, 4);
        let file = InstanceFile::from_graph(&g, Some(0), None)?;
        let text = file.to_json();
        let back = InstanceFile::parse(&text)?;
        let g2: WeightedGraph<Exact> = back.to_graph()?;
        let mut t = Tally::default();
        t.check(back == file && back.to_json() == text, || format!("instance {i} changed on round trip"));
        let same = g.edges() == g2.edges()
            && (0..g.vertex_count()).all(|v| g.facility_cost(v) == g2.facility_cost(v) && g.capacity(v) == g2.capacity(v));
        t.check(same, || format!("graph {i} changed on round trip"));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("instance_round_trip", t, ""))
}
