//! Error frontier by enumerating every partial bijection.

use super::apsp::AllPairs;
use crate::error::{input, Error, Result};
use crate::error_model::{OutlierError, ParetoFrontier};
use crate::graph::{Priority, WeightedGraph};
use crate::request::{Demand, PredictionSet, Request};
use crate::scalar::{Extended, Scalar};
use std::collections::BTreeMap;

const MAX_SIDE: usize = 6;

fn pair_cost<T: Scalar>(a: &Demand, b: &Demand, apsp: &mut BTreeMap<Priority, AllPairs<T>>, graph: &WeightedGraph<T>) -> Result<Extended<T>> {
    let mut d = |j: Priority, u: usize, v: usize| -> Extended<T> {
        apsp.entry(j).or_insert_with(|| AllPairs::new(graph, j)).d(u, v).clone()
    };
    Ok(match (a, b) {
        (Demand::Terminal(x), Demand::Terminal(y)) | (Demand::Client(x), Demand::Client(y)) => d(1, *x, *y),
        (
            Demand::TerminalPair { s: s1, t: t1, priority: p1 },
            Demand::TerminalPair { s: s2, t: t2, priority: p2 },
        ) => {
            if p1 != p2 {
                Extended::Infinite
            } else {
                let same = d(*p1, *s1, *s2).add(&d(*p1, *t1, *t2));
                let cross = d(*p1, *s1, *t2).add(&d(*p1, *s2, *t1));
                same.min(cross)
            }
        }
        _ => return input("mixed request kinds"),
    })
}

/// Frontier over the original graph, computed by brute force.
pub fn exact_matching_frontier<T: Scalar>(
    graph: &WeightedGraph<T>,
    requests: &[Request],
    predictions: &PredictionSet,
) -> Result<ParetoFrontier<T>> {
    let (n, m) = (requests.len(), predictions.len());
    if n > MAX_SIDE || m > MAX_SIDE {
        return Err(Error::OverBudget { what: "frontier side", limit: MAX_SIDE, actual: n.max(m) });
    }
    let mut apsp = BTreeMap::new();
    let mut cost = vec![vec![Extended::Infinite; m]; n];
    for i in 0..n {
        for j in 0..m {
            cost[i][j] = pair_cost(&requests[i].demand, &predictions.items[j], &mut apsp, graph)?;
        }
    }
    // best[k] = (cost, pair list) with the lexicographically smallest list on ties
    let mut best: Vec<Option<(T, Vec<(usize, usize)>)>> = vec![None; n.min(m) + 1];
    let mut current: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; m];
    enumerate(0, &cost, &mut used, &mut current, T::zero(), &mut best);

    let candidates: Vec<(usize, T, Vec<(usize, usize)>)> = best
        .into_iter()
        .enumerate()
        .filter_map(|(k, b)| b.map(|(c, p)| (n + m - 2 * k, c, p)))
        .collect();
    let mut points: Vec<OutlierError<T>> = Vec::new();
    for (delta, c, pairs) in &candidates {
        let dominated = candidates
            .iter()
            .any(|(d2, c2, _)| d2 <= delta && c2 <= c && (d2 < delta || c2 < c));
        if dominated {
            continue;
        }
        let mut rq: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let mut pr: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        rq.sort_unstable();
        pr.sort_unstable();
        points.push(OutlierError {
            delta: *delta,
            matching_cost: c.clone(),
            matched_requests: rq,
            matched_predictions: pr,
            matching: pairs.clone(),
        });
    }
    points.sort_by_key(|p| p.delta);
    Ok(ParetoFrontier { points })
}

fn enumerate<T: Scalar>(
    row: usize,
    cost: &[Vec<Extended<T>>],
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    total: T,
    best: &mut [Option<(T, Vec<(usize, usize)>)>],
) {
    if row == cost.len() {
        let k = current.len();
        let better = match &best[k] {
            None => true,
            Some((c, p)) => total < *c || (total == *c && *current < *p),
        };
        if better {
            best[k] = Some((total, current.clone()));
        }
        return;
    }
    enumerate(row + 1, cost, used, current, total.clone(), best);
    for j in 0..used.len() {
        if used[j] {
            continue;
        }
        let Some(c) = cost[row][j].finite() else { continue };
        used[j] = true;
        current.push((row, j));
        enumerate(row + 1, cost, used, current, total.clone() + c.clone(), best);
        current.pop();
        used[j] = false;
    }
}
