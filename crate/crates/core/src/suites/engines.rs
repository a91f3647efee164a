use num_traits::Zero;
use super::instances::{opt_exact, vertices_of};
use super::{par_tally, Options, Outcome, Tally};
use crate::adversaries::fotakis_lb_run;
use crate::engines::{BermanCoulston, Fotakis, GreedyTree, OnlineEngine};
use crate::error::Result;
use crate::generators::{add_facilities, random_demands, random_graph};
use crate::graph::{balls_meet, UnionFind, WeightedGraph, ZeroCostOverlay};
use crate::oracles::exact_facility_location;
use crate::request::{sequence, DemandKind, Request};
use crate::scalar::{Extended, Scalar};
use crate::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Request-count groups for the subset constants.
const GROUPS: [usize; 4] = [2, 4, 6, 8];

fn engine_instance(kind: DemandKind, seed: u64, count: usize, max_vertices: usize) -> Result<(WeightedGraph<Exact>, Vec<Request>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(5..=max_vertices);
    let cap = if kind == DemandKind::TerminalPair { 12 } else { 14 };
    let extra = rng.gen_range(0..=(cap - (n - 1)).min(6));
    let mut g = random_graph(&mut rng, n, extra, 9);
    if kind == DemandKind::Client {
        add_facilities(&mut rng, &mut g, 1, 12, 0.6);
    }
    let requests = sequence(random_demands(&mut rng, &g, kind, count, 1)?);
    Ok((g, requests))
}

fn run_engine<'g>(g: &'g WeightedGraph<Exact>, kind: DemandKind, requests: &[Request]) -> Result<Box<dyn OnlineEngine<Exact> + 'g>> {
    let overlay = ZeroCostOverlay::new(g);
    let mut e: Box<dyn OnlineEngine<Exact> + 'g> = match kind {
        DemandKind::Terminal => Box::new(GreedyTree::new(g, 0, overlay)?),
        DemandKind::TerminalPair => Box::new(BermanCoulston::new(g, overlay)),
        DemandKind::Client => Box::new(Fotakis::new(g, overlay)?),
    };
    for r in requests {
        e.serve(&r.demand)?;
    }
    Ok(e)
}

/// `max over R' of charged(R') / ((log2 |R'| + 2) · OPT)` for one run;
/// `None` if some charge is positive while `OPT = 0`.
fn subset_constant(charged: &[Exact], opt: &Exact) -> Option<f64> {
    let k = charged.len();
    let zero = Exact::zero();
    let mut best = 0.0f64;
    for mask in 1usize..(1 << k) {
        let sum = (0..k).filter(|i| mask & (1 << i) != 0).fold(zero.clone(), |a, i| a + charged[i].clone());
        if sum == zero {
            continue;
        }
        if *opt == zero {
            return None;
        }
        let size = mask.count_ones() as f64;
        best = best.max((sum / opt.clone()).as_f64() / (size.log2() + 2.0));
    }
    Some(best)
}

/// `C` per request-count group. Each instance is a growing family: the
/// group `|R| = k` sees its first `k` requests. An online engine charges
/// a prefix exactly as it does inside the longer run.
fn group_constants(opts: &Options, salt: u64, kind: DemandKind) -> Result<(Vec<f64>, Tally)> {
    use rayon::prelude::*;
    let families = opts.count(150, 300);
    let longest = *GROUPS.last().unwrap();
    let parts: Vec<Result<Vec<Option<f64>>>> = (0..families)
        .into_par_iter()
        .map(|i| {
            let (g, requests) = engine_instance(kind, opts.seed_for(salt, i), longest, 8)?;
            let e = run_engine(&g, kind, &requests)?;
            let charged: Vec<Exact> = e.log().iter().map(|r| r.charged.clone()).collect();
            GROUPS
                .iter()
                .map(|&k| Ok(subset_constant(&charged[..k], &opt_exact(&g, kind, Some(0), &requests[..k])?)))
                .collect()
        })
        .collect();
    let mut constants = vec![0.0f64; GROUPS.len()];
    let mut tally = Tally::default();
    for (i, p) in parts.into_iter().enumerate() {
        for (gi, value) in p?.into_iter().enumerate() {
            match value {
                Some(v) => {
                    tally.case();
                    constants[gi] = constants[gi].max(v);
                }
                None => tally.fail(format!("|R| = {}, family {i}: positive charge with OPT = 0", GROUPS[gi])),
            }
        }
    }
    Ok((constants, tally))
}

fn subset_competitive(opts: &Options, name: &'static str, salt: u64, kind: DemandKind) -> Result<Outcome> {
    let (first, mut tally) = group_constants(opts, salt, kind)?;
    let (again, _) = group_constants(opts, salt, kind)?;
    tally.check(first.iter().map(|c| c.to_bits()).eq(again.iter().map(|c| c.to_bits())), || {
        format!("constants changed on re-run: {first:?} vs {again:?}")
    });
    for w in 1..first.len() {
        tally.check(first[w] <= first[w - 1], || {
            format!("C rose from {:.4} (|R| = {}) to {:.4} (|R| = {})", first[w - 1], GROUPS[w - 1], first[w], GROUPS[w])
        });
    }
    let mut shown: Vec<String> = GROUPS.iter().zip(&first).map(|(k, c)| format!("|R|={k}: C={c:.4}")).collect();
    // reported, not failed: the constant of the bound is not known
    if first.iter().any(|&c| c > 2.0) {
        shown.push("flagged: C above 2".into());
    }
    Ok(Outcome::from_tally(name, tally, shown.join(", ")))
}

pub fn st_subset_competitive(opts: &Options) -> Result<Outcome> {
    subset_competitive(opts, "st_subset_competitive", 20, DemandKind::Terminal)
}

pub fn bc_subset_competitive(opts: &Options) -> Result<Outcome> {
    subset_competitive(opts, "bc_subset_competitive", 21, DemandKind::TerminalPair)
}

/// Acyclic meta-graphs, disjoint balls, `n_j <= 2|D_j|` and
/// `|D_j| · 2^(j-2) <= OPT`.
pub fn bc_structure(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed_for(22, i));
        let count = rng.gen_range(1..=8);
        let (g, requests) = engine_instance(DemandKind::TerminalPair, rng.gen(), count, 8)?;
        let mut e = BermanCoulston::new(&g, ZeroCostOverlay::new(&g));
        let mut t = Tally::default();
        for r in &requests {
            e.serve(&r.demand)?;
            t.check(!e.cycle_detected(), || format!("instance {i}: meta-edge closed a cycle"));
        }
        let opt = opt_exact(&g, DemandKind::TerminalPair, None, &requests)?;
        let metric = g.metric();
        for (&j, level) in e.levels() {
            let balls = level.centers.len();
            let mut uf = UnionFind::new(balls);
            let acyclic = level.meta_edges.iter().all(|&(a, b)| uf.union(a, b));
            t.check(acyclic, || format!("instance {i}: M_{j} has a cycle"));
            t.check(level.iterations <= 2 * balls, || format!("instance {i}: n_{j} = {} > 2|D_{j}| = {}", level.iterations, 2 * balls));
            let r = Exact::pow2(j - 2);
            for a in 0..balls {
                for b in a + 1..balls {
                    let d = metric.distance(level.centers[a], level.centers[b])?;
                    t.check(!balls_meet(&d, &r, &r), || format!("instance {i}: balls {a},{b} of D_{j} overlap"));
                }
            }
            let bound = Exact::from_count(balls) * r;
            t.check(bound <= opt, || format!("instance {i}: |D_{j}|·2^({j}-2) = {bound} > OPT = {opt}"));
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("bc_structure", t, ""))
}

pub fn fl_potential_stability(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed_for(23, i));
        let count = rng.gen_range(1..=20);
        let (g, requests) = engine_instance(DemandKind::Client, rng.gen(), count, 14)?;
        let mut e = Fotakis::new(&g, ZeroCostOverlay::new(&g))?;
        let mut t = Tally::default();
        for (step, r) in requests.iter().enumerate() {
            e.serve(&r.demand)?;
            for (v, p, f) in e.potentials() {
                t.check(p <= f, || format!("instance {i} step {step}: p({v}) = {p} > f = {f}"));
            }
        }
        t.check(e.potential_violations() == 0, || format!("instance {i}: engine counted violations"));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("fl_potential_stability", t, ""))
}

pub fn fl_amortization(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed_for(24, i));
        let count = rng.gen_range(1..=20);
        let (g, requests) = engine_instance(DemandKind::Client, rng.gen(), count, 14)?;
        let e = run_engine(&g, DemandKind::Client, &requests)?;
        let mut t = Tally::default();
        let (mut alpha, mut actual) = (Exact::zero(), Exact::zero());
        for (step, r) in e.log().iter().enumerate() {
            alpha = alpha + r.charged.clone();
            actual = actual + r.actual.clone();
            t.check(alpha >= actual, || format!("instance {i} after {step}: sum alpha {alpha} < actual {actual}"));
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("fl_amortization", t, ""))
}

/// Per cluster `C` of an exact optimum at `v`, for `k' = |C ∩ R'|`:
/// `alpha(C ∩ R') <= 2(log2 k' + 1) f_v + 4(log2 k' + 1) OPT_C(C)`.
pub fn fl_subset_competitive(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed_for(25, i));
        let count = rng.gen_range(1..=8);
        let (g, requests) = engine_instance(DemandKind::Client, rng.gen(), count, 8)?;
        let e = run_engine(&g, DemandKind::Client, &requests)?;
        let alpha: Vec<Exact> = e.log().iter().map(|r| r.charged.clone()).collect();
        let clients = vertices_of(&requests);
        let opt = exact_facility_location(&g, &clients)?;
        let metric = g.metric();
        let mut clusters: Vec<(Exact, Vec<usize>, Exact)> = Vec::new();
        for &v in &opt.facilities {
            let members: Vec<usize> = (0..clients.len()).filter(|&j| opt.assignment[j] == v).collect();
            let mut conn = Exact::zero();
            for &j in &members {
                if let Extended::Finite(d) = metric.distance(clients[j], v)? {
                    conn = conn + d;
                }
            }
            clusters.push((g.facility_cost(v).unwrap().clone(), members, conn));
        }
        let mut t = Tally::default();
        let k = clients.len();
        for mask in 1usize..(1 << k) {
            let mut total_bound = 0.0f64;
            let mut total_alpha = Exact::zero();
            for (f, members, conn) in &clusters {
                let inside: Vec<usize> = members.iter().copied().filter(|j| mask & (1 << j) != 0).collect();
                if inside.is_empty() {
                    continue;
                }
                let a = inside.iter().fold(Exact::zero(), |s, &j| s + alpha[j].clone());
                let kp = inside.len();
                // exact with floor(log2 k'), then the real logarithm
                let lower = Exact::from_count(kp.ilog2() as usize + 1);
                let two = Exact::from_count(2);
                let exact_ok = a <= lower * (two.clone() * f.clone() + two.clone() * two * conn.clone());
                let factor = (kp as f64).log2() + 1.0;
                let bound = factor * (2.0 * f.as_f64() + 4.0 * conn.as_f64());
                total_bound += bound;
                total_alpha = total_alpha + a.clone();
                t.check(exact_ok || a.as_f64() <= bound * (1.0 + 1e-12), || {
                    format!("instance {i} subset {mask:b}: cluster alpha {a} > {bound:.4}")
                });
            }
            t.check(total_alpha.as_f64() <= total_bound * (1.0 + 1e-12), || {
                format!("instance {i} subset {mask:b}: alpha(R') = {total_alpha} > {total_bound:.4}")
            });
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("fl_subset_competitive", t, ""))
}

/// On the tree lower bound, the last request of each phase costs linearly
/// many optima in actual cost but logarithmically many in alpha.
pub fn fl_actual_cost_witness(opts: &Options) -> Result<Outcome> {
    let mut t = Tally::default();
    let mut shown = Vec::new();
    for m in 2..=opts.count(3, 4) as u32 {
        let run = fotakis_lb_run::<Exact>(m)?;
        let size = run.subset.len() as f64;
        let actual = (run.subset_actual.clone() / run.opt.clone()).as_f64();
        let alpha = (run.subset_alpha.clone() / run.opt.clone()).as_f64();
        shown.push(format!("m={m}: actual/OPT={actual:.3}, alpha/OPT={alpha:.3}"));
        t.check(actual >= size / 4.0, || format!("m = {m}: actual(R')/OPT = {actual:.3} < |R'|/4"));
        t.check(alpha <= 8.0 * size.log2(), || format!("m = {m}: alpha(R')/OPT = {alpha:.3} > 8 log2 |R'|"));
    }
    Ok(Outcome::from_tally("fl_actual_cost_witness", t, shown.join(", ")))
}
