//! Invariant suites. Every check builds its own seeded instances, runs the
//! algorithms in exact arithmetic and compares against the brute-force
//! oracles. `cmd_verify` and the acceptance test both read the registry.

mod adversaries;
mod engines;
mod errors;
pub mod framework;
mod graph;
pub mod instances;
mod oracles;
mod pc;
mod reductions;

use crate::error::Result;
use rayon::prelude::*;
use std::fmt;

/// Instance counts: `Full` is what the acceptance criteria ask for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub scale: Scale,
    pub seed: u64,
}

impl Options {
    pub fn quick(seed: u64) -> Self {
        Options { scale: Scale::Quick, seed }
    }

    pub fn full(seed: u64) -> Self {
        Options { scale: Scale::Full, seed }
    }

    /// `full` instances at full scale, `quick` otherwise.
    pub fn count(&self, quick: usize, full: usize) -> usize {
        match self.scale {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }

    pub(crate) fn seed_for(&self, salt: u64, i: usize) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (salt << 32) ^ i as u64
    }
}

/// Cases checked and the first few violations.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub violations: usize,
    pub examples: Vec<String>,
}

impl Tally {
    pub fn case(&mut self) {
        self.cases += 1;
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what());
        }
    }

    pub fn fail(&mut self, what: String) {
        self.violations += 1;
        if self.examples.len() < 3 {
            self.examples.push(what);
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.violations += other.violations;
        for e in other.examples {
            if self.examples.len() < 3 {
                self.examples.push(e);
            }
        }
        self
    }
}

/// Runs `f` on `0..n` in parallel and merges the tallies in index order.
pub(crate) fn par_tally(n: usize, f: impl Fn(usize) -> Result<Tally> + Sync) -> Result<Tally> {
    let parts: Vec<Result<Tally>> = (0..n).into_par_iter().map(&f).collect();
    let mut total = Tally::default();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total)
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub violations: usize,
    pub detail: String,
}

impl Outcome {
    pub fn from_tally(name: &'static str, t: Tally, extra: impl Into<String>) -> Self {
        let mut detail = extra.into();
        if !t.examples.is_empty() {
            if !detail.is_empty() {
                detail.push_str("; ");
            }
            detail.push_str(&t.examples.join("; "));
        }
        Outcome { name, passed: t.violations == 0 && t.cases > 0, cases: t.cases, violations: t.violations, detail }
    }

    pub fn error(name: &'static str, e: &crate::error::Error) -> Self {
        Outcome { name, passed: false, cases: 0, violations: 0, detail: format!("error: {e}") }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({} cases, {} violations){}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.violations,
            if self.detail.is_empty() { "" } else { ": " },
            self.detail
        )
    }
}

pub type CheckFn = fn(&Options) -> Result<Outcome>;

pub struct Check {
    pub name: &'static str,
    pub module: &'static str,
    pub run: CheckFn,
}

impl Check {
    pub fn execute(&self, opts: &Options) -> Outcome {
        (self.run)(opts).unwrap_or_else(|e| Outcome::error(self.name, &e))
    }
}

macro_rules! checks {
    ($($module:literal => [$($name:literal : $f:path),* $(,)?]),* $(,)?) => {
        vec![$($(Check { name: $name, module: $module, run: $f }),*),*]
    };
}

/// Every module-level invariant, in module order.
pub fn registry() -> Vec<Check> {
    checks! {
        "graph-core" => [
            "triangle_inequality": graph::triangle_inequality,
            "distance_monotonicity": graph::distance_monotonicity,
            "shortest_path_vs_all_pairs": graph::shortest_path_vs_all_pairs,
            "instance_round_trip": graph::instance_round_trip,
        ],
        "requests-and-errors" => [
            "frontier_size_identity": errors::frontier_size_identity,
            "frontier_monotone": errors::frontier_monotone,
            "frontier_oracle_equivalence": errors::frontier_oracle_equivalence,
        ],
        "online-engines" => [
            "st_subset_competitive": engines::st_subset_competitive,
            "bc_subset_competitive": engines::bc_subset_competitive,
            "bc_structure": engines::bc_structure,
            "fl_potential_stability": engines::fl_potential_stability,
            "fl_amortization": engines::fl_amortization,
            "fl_subset_competitive": engines::fl_subset_competitive,
            "fl_actual_cost_witness": engines::fl_actual_cost_witness,
        ],
        "prize-collecting" => [
            "pc_self_consistency": pc::self_consistency,
            "pc_approximation": pc::approximation,
            "pc_exact_penalty_monotone": pc::exact_penalty_monotone,
        ],
        "prediction-framework" => [
            "partial_bicriteria": framework::partial_bicriteria,
            "framework_structure": framework::structure,
            "b_hat_bound": framework::b_hat_bound,
            "prediction_free_equivalence": framework::prediction_free_equivalence,
            "scale_freeness": framework::scale_freeness,
            "error_trend": framework::error_trend,
        ],
        "reductions" => [
            "capacitated_distance_preservation": reductions::distance_preservation,
            "capacitated_playback": reductions::playback,
            "capacitated_opt_ratio": reductions::opt_ratio,
            "priority_split_lossless": reductions::priority_split_lossless,
        ],
        "adversaries" => [
            "diamond_counts": adversaries::diamond_counts,
            "diamond_ratio_increasing": adversaries::diamond_ratio_increasing,
            "nk_delta_cardinalities": adversaries::nk_delta_cardinalities,
            "fotakis_lb_pattern": adversaries::fotakis_lb_pattern,
            "matching_lb": adversaries::matching_lb,
        ],
        "exact-oracles" => [
            "oracle_lower_bound": oracles::oracle_lower_bound,
            "capacitated_oracle_infinite_capacity": oracles::infinite_capacity,
        ],
    }
}

/// Number of registered checks; `cmd_verify` asserts the registry has
/// exactly this many distinct names.
pub const CHECK_COUNT: usize = 34;

pub fn find(name: &str) -> Option<Check> {
    registry().into_iter().find(|c| c.name == name)
}

/// The checks behind each acceptance criterion, `1..=12`.
pub fn criterion_checks(criterion: u8) -> &'static [&'static str] {
    match criterion {
        1 => &["partial_bicriteria"],
        2 => &["framework_structure"],
        3 => &["b_hat_bound"],
        4 => &["st_subset_competitive", "bc_subset_competitive", "fl_subset_competitive"],
        5 => &["fl_amortization"],
        6 => &["fl_potential_stability"],
        7 => &["bc_structure"],
        8 => &["capacitated_playback", "capacitated_opt_ratio"],
        9 => &["scale_freeness"],
        10 => &["error_trend"],
        11 => &["diamond_ratio_increasing", "fotakis_lb_pattern", "matching_lb"],
        12 => &["frontier_oracle_equivalence"],
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn registry_is_complete() {
        let reg = registry();
        let names: HashSet<&str> = reg.iter().map(|c| c.name).collect();
        assert_eq!(names.len(), reg.len());
        assert_eq!(reg.len(), CHECK_COUNT);
        for c in 1..=12 {
            for name in criterion_checks(c) {
                assert!(names.contains(name), "{name}");
            }
        }
    }
}
