//! Cardinality-constrained minimum-cost bipartite matching.
//!
//! Successive shortest augmenting paths produce, for every size `k`, the
//! cheapest matching of exactly `k` pairs. Edge weights carry a secondary
//! lexicographic key so that among equal-cost matchings the one with the
//! lexicographically smallest sorted pair list wins.

use crate::error::{input, Result};
use crate::scalar::{Extended, Scalar};
use std::cmp::Ordering;

/// Primary cost plus a sparse integer tie-break vector, compared
/// lexicographically (cost first).
#[derive(Clone, Debug)]
struct LexWeight<T> {
    cost: T,
    /// Sorted by position, no zero coefficients.
    tie: Vec<(u32, i32)>,
}

impl<T: Scalar> LexWeight<T> {
    fn zero() -> Self {
        LexWeight { cost: T::zero(), tie: Vec::new() }
    }

    fn combine(&self, other: &Self, sign: i32) -> Self {
        let mut tie = Vec::with_capacity(self.tie.len() + other.tie.len());
        let (mut i, mut j) = (0, 0);
        while i < self.tie.len() || j < other.tie.len() {
            let a = self.tie.get(i);
            let b = other.tie.get(j);
            match (a, b) {
                (Some(&(pa, ca)), Some(&(pb, cb))) if pa == pb => {
                    let c = ca + sign * cb;
                    if c != 0 {
                        tie.push((pa, c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(pa, ca)), Some(&(pb, _))) if pa < pb => {
                    tie.push((pa, ca));
                    i += 1;
                }
                (Some(&(pa, ca)), None) => {
                    tie.push((pa, ca));
                    i += 1;
                }
                (_, Some(&(pb, cb))) => {
                    tie.push((pb, sign * cb));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let cost = if sign > 0 {
            self.cost.clone() + other.cost.clone()
        } else {
            self.cost.clone() - other.cost.clone()
        };
        LexWeight { cost, tie }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        match self.cost.partial_cmp(&other.cost).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            let a = self.tie.get(i);
            let b = other.tie.get(j);
            let (ca, cb) = match (a, b) {
                (None, None) => return Ordering::Equal,
                (Some(&(pa, ca)), Some(&(pb, cb))) if pa == pb => {
                    i += 1;
                    j += 1;
                    (ca, cb)
                }
                (Some(&(pa, ca)), Some(&(pb, _))) if pa < pb => {
                    i += 1;
                    (ca, 0)
                }
                (Some(&(_, ca)), None) => {
                    i += 1;
                    (ca, 0)
                }
                (_, Some(&(_, cb))) => {
                    j += 1;
                    (0, cb)
                }
            };
            match ca.cmp(&cb) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
    }
}

/// Optimal matching of one fixed size.
#[derive(Clone, Debug, PartialEq)]
pub struct SizedMatching<T> {
    pub cost: T,
    /// `(row, column)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
}

fn check_matrix<T: Scalar>(costs: &[Vec<Extended<T>>]) -> Result<usize> {
    let cols = costs.first().map_or(0, |r| r.len());
    for (i, row) in costs.iter().enumerate() {
        if row.len() != cols {
            return input(format!("cost matrix row {i} has {} entries, expected {cols}", row.len()));
        }
        if row.iter().any(|c| c.finite().is_some_and(|x| *x < T::zero())) {
            return input(format!("cost matrix row {i} has a negative entry"));
        }
    }
    Ok(cols)
}

/// Optimal matchings of sizes `0, 1, ..., K` where `K` is the maximum size
/// achievable with finite entries. Entry `k` of the result has `k` pairs.
pub fn matching_ladder<T: Scalar>(costs: &[Vec<Extended<T>>]) -> Result<Vec<SizedMatching<T>>> {
    let rows = costs.len();
    let cols = check_matrix(costs)?;
    let weight = |i: usize, j: usize| -> Option<LexWeight<T>> {
        costs[i][j].finite().map(|c| LexWeight {
            cost: c.clone(),
            tie: vec![((i * cols + j) as u32, -1)],
        })
    };
    let mut row_mate: Vec<Option<usize>> = vec![None; rows];
    let mut col_mate: Vec<Option<usize>> = vec![None; cols];
    let mut total = LexWeight::zero();
    let mut ladder = vec![SizedMatching { cost: T::zero(), pairs: Vec::new() }];

    loop {
        // Bellman-Ford over the residual graph: free rows start at 0,
        // forward arcs row->col are unmatched pairs, backward arcs col->row
        // are matched pairs with negated weight.
        let mut row_dist: Vec<Option<LexWeight<T>>> =
            (0..rows).map(|i| row_mate[i].is_none().then(LexWeight::zero)).collect();
        let mut col_dist: Vec<Option<LexWeight<T>>> = vec![None; cols];
        let mut col_pred: Vec<usize> = vec![usize::MAX; cols];
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..rows {
                let Some(di) = row_dist[i].clone() else { continue };
                for j in 0..cols {
                    if row_mate[i] == Some(j) {
                        continue;
                    }
                    let Some(w) = weight(i, j) else { continue };
                    let cand = di.combine(&w, 1);
                    let better = match &col_dist[j] {
                        None => true,
                        Some(old) => cand.cmp(old) == Ordering::Less,
                    };
                    if better {
                        col_dist[j] = Some(cand);
                        col_pred[j] = i;
                        changed = true;
                    }
                }
            }
            for j in 0..cols {
                let (Some(i), Some(dj)) = (col_mate[j], col_dist[j].clone()) else { continue };
                let w = weight(i, j).expect("matched pair has finite cost");
                let cand = dj.combine(&w, -1);
                let better = match &row_dist[i] {
                    None => true,
                    Some(old) => cand.cmp(old) == Ordering::Less,
                };
                if better {
                    row_dist[i] = Some(cand);
                    changed = true;
                }
            }
        }
        let mut best: Option<(usize, LexWeight<T>)> = None;
        for j in 0..cols {
            if col_mate[j].is_some() {
                continue;
            }
            if let Some(d) = &col_dist[j] {
                if best.as_ref().map_or(true, |(_, b)| d.cmp(b) == Ordering::Less) {
                    best = Some((j, d.clone()));
                }
            }
        }
        let Some((mut j, gain)) = best else { break };
        total = total.combine(&gain, 1);
        loop {
            let i = col_pred[j];
            let prev = row_mate[i];
            row_mate[i] = Some(j);
            col_mate[j] = Some(i);
            match prev {
                Some(pj) => {
                    col_mate[pj] = None;
                    j = pj;
                }
                None => break,
            }
        }
        let pairs: Vec<(usize, usize)> =
            (0..rows).filter_map(|i| row_mate[i].map(|j| (i, j))).collect();
        let cost = pairs
            .iter()
            .fold(T::zero(), |acc, &(i, j)| acc + costs[i][j].finite().unwrap().clone());
        debug_assert!(cost == total.cost);
        ladder.push(SizedMatching { cost, pairs });
    }
    Ok(ladder)
}

/// Cheapest matching of exactly `k` pairs; `Infinite` when no finite
/// matching of that size exists.
pub fn min_cost_matching_of_size<T: Scalar>(
    costs: &[Vec<Extended<T>>],
    k: usize,
) -> Result<(Extended<T>, Vec<(usize, usize)>)> {
    let cols = check_matrix(costs)?;
    if k > costs.len().min(cols) {
        return input(format!("matching size {k} exceeds matrix dimensions {}x{cols}", costs.len()));
    }
    let ladder = matching_ladder(costs)?;
    Ok(match ladder.into_iter().nth(k) {
        Some(m) => (Extended::Finite(m.cost), m.pairs),
        None => (Extended::Infinite, Vec::new()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: i64) -> Extended<f64> {
        Extended::Finite(x as f64)
    }

    #[test]
    fn small_examples() {
        let empty: Vec<Vec<Extended<f64>>> = vec![vec![f(1)]];
        assert_eq!(min_cost_matching_of_size(&empty, 0).unwrap(), (f(0), vec![]));
        assert_eq!(min_cost_matching_of_size(&[vec![f(4)]], 1).unwrap(), (f(4), vec![(0, 0)]));
        let m = vec![vec![f(1), f(10)], vec![f(10), f(1)]];
        assert_eq!(min_cost_matching_of_size(&m, 2).unwrap(), (f(2), vec![(0, 0), (1, 1)]));
        assert!(min_cost_matching_of_size(&m, 3).is_err());
    }

    #[test]
    fn infinite_entries_limit_size() {
        let m = vec![vec![f(1), Extended::Infinite], vec![f(2), Extended::Infinite]];
        assert_eq!(min_cost_matching_of_size(&m, 1).unwrap(), (f(1), vec![(0, 0)]));
        assert_eq!(min_cost_matching_of_size(&m, 2).unwrap().0, Extended::Infinite);
    }

    #[test]
    fn ties_pick_smallest_pair_list() {
        let m = vec![vec![f(0), f(0)], vec![f(0), f(0)]];
        let ladder = matching_ladder(&m).unwrap();
        assert_eq!(ladder[1].pairs, vec![(0, 0)]);
        assert_eq!(ladder[2].pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn augmenting_path_reroutes() {
        // size 1 takes (0,0); size 2 must move row 0 to column 1
        let m = vec![vec![f(1), f(2)], vec![f(3), f(100)]];
        let ladder = matching_ladder(&m).unwrap();
        assert_eq!(ladder[1].cost, 1.0);
        assert_eq!(ladder[2].cost, 5.0);
        assert_eq!(ladder[2].pairs, vec![(0, 1), (1, 0)]);
    }
}
