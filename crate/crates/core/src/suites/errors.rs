use super::instances::KINDS;
use super::{par_tally, Options, Outcome, Tally};
use crate::error::Result;
use crate::error_model::{cost_matrix, pair_matching_cost, pareto_frontier};
use crate::generators::{random_demands, random_graph, with_priorities};
use crate::graph::WeightedGraph;
use crate::matching::matching_ladder;
use crate::oracles::exact_matching_frontier;
use crate::request::{sequence, DemandKind, PredictionSet, Request};
use crate::scalar::Extended;
use crate::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random metric plus up to `side` requests and predictions of one kind.
fn sample(seed: u64, side: usize) -> Result<(WeightedGraph<Exact>, Vec<Request>, PredictionSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = KINDS[rng.gen_range(0..3)];
    let n = rng.gen_range(3..=10);
    let extra = rng.gen_range(0..=n);
    let mut g = random_graph(&mut rng, n, extra, 12);
    let b = if kind == DemandKind::TerminalPair { rng.gen_range(1..=3) } else { 1 };
    if b > 1 {
        g = with_priorities(&mut rng, &g, b);
    }
    let r = rng.gen_range(0..=side);
    let p = rng.gen_range(0..=side);
    let requests = sequence(random_demands(&mut rng, &g, kind, r, b)?);
    let predictions = PredictionSet::new(random_demands(&mut rng, &g, kind, p, b)?);
    Ok((g, requests, predictions))
}

pub fn frontier_size_identity(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(60, 300), |i| {
        let (g, requests, predictions) = sample(opts.seed_for(10, i), 7)?;
        let metric = g.metric();
        let f = pareto_frontier(&requests, &predictions, &metric)?;
        let total = requests.len() + predictions.len();
        let mut t = Tally::default();
        for p in &f.points {
            let k = p.matched();
            t.check(p.delta + 2 * k == total, || format!("instance {i}: delta {} with {k} pairs of {total}", p.delta));
            t.check(p.matched_requests.len() == k && p.matched_predictions.len() == k, || {
                format!("instance {i}: witness sizes differ")
            });
            let mut sum = Extended::zero();
            for &(a, b) in &p.matching {
                sum = sum.add(&pair_matching_cost(&requests[a].demand, &predictions.items[b], &metric)?);
            }
            t.check(sum == Extended::Finite(p.matching_cost.clone()), || {
                format!("instance {i}: D = {} but witness costs {sum}", p.matching_cost)
            });
        }
        // (total, 0) itself is dominated once some pair matches at cost 0
        if let Some(last) = f.points.last() {
            t.check(last.matching_cost == Exact::from_integer(0.into()), || {
                format!("instance {i}: frontier ends at D = {}", last.matching_cost)
            });
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("frontier_size_identity", t, ""))
}

pub fn frontier_monotone(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(60, 300), |i| {
        let (g, requests, predictions) = sample(opts.seed_for(11, i), 7)?;
        let metric = g.metric();
        let mut t = Tally::default();
        if !requests.is_empty() {
            let ladder = matching_ladder(&cost_matrix(&requests, &predictions, &metric)?)?;
            for k in 1..ladder.len() {
                t.check(ladder[k - 1].cost <= ladder[k].cost, || format!("instance {i}: {k}-matching cheaper than {}", k - 1));
            }
        }
        let f = pareto_frontier(&requests, &predictions, &metric)?;
        for w in f.points.windows(2) {
            t.check(w[0].delta < w[1].delta && w[0].matching_cost > w[1].matching_cost, || {
                format!("instance {i}: frontier not strictly decreasing")
            });
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("frontier_monotone", t, ""))
}

pub fn frontier_oracle_equivalence(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(60, 300), |i| {
        let (g, requests, predictions) = sample(opts.seed_for(12, i), 6)?;
        let fast = pareto_frontier(&requests, &predictions, &g.metric())?;
        let slow = exact_matching_frontier(&g, &requests, &predictions)?;
        let key = |f: &crate::error_model::ParetoFrontier<Exact>| {
            f.points.iter().map(|p| (p.delta, p.matching_cost.clone())).collect::<Vec<_>>()
        };
        let mut t = Tally::default();
        t.check(key(&fast) == key(&slow), || format!("metric {i}: {:?} vs oracle {:?}", key(&fast), key(&slow)));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("frontier_oracle_equivalence", t, ""))
}
