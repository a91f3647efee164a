use super::instances::{small, vertices_of, Limits, KINDS};
use super::{par_tally, Options, Outcome, Tally};
use crate::error::Result;
use crate::framework::{run_engine_only, run_with_predictions, standard_engine};
use crate::oracles::{exact_capacitated_fl, exact_facility_location};
use crate::prize_collecting::default_solver;
use crate::request::DemandKind;

/// The exact optimum is below the engine alone and the framework.
pub fn oracle_lower_bound(opts: &Options) -> Result<Outcome> {
    let t = par_tally(3 * opts.count(30, 150), |i| {
        let kind = KINDS[i % 3];
        let s = small(kind, opts.seed_for(60, i), Limits::DEFAULT)?;
        let opt = s.opt()?;
        let (actual, _, _) = run_engine_only(&s.graph, &s.requests, standard_engine(&s.graph, kind, s.root))?;
        let solver = default_solver(kind);
        let report = run_with_predictions(
            &s.graph,
            kind,
            s.root,
            &s.requests,
            &s.predictions,
            solver.as_ref(),
            standard_engine(&s.graph, kind, s.root),
        )?;
        let mut t = Tally::default();
        t.check(opt <= actual, || format!("{kind:?} instance {i}: OPT {opt} above engine {actual}"));
        t.check(opt <= report.total_cost, || format!("{kind:?} instance {i}: OPT {opt} above framework {}", report.total_cost));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("oracle_lower_bound", t, ""))
}

/// Without capacity data the soft-capacitated oracle is facility location.
pub fn infinite_capacity(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let s = small(DemandKind::Client, opts.seed_for(61, i), Limits { max_requests: 7, max_predictions: 0 })?;
        let clients = vertices_of(&s.requests);
        let a = exact_capacitated_fl(&s.graph, &clients)?.cost;
        let b = exact_facility_location(&s.graph, &clients)?.cost;
        let mut t = Tally::default();
        t.check(a == b, || format!("instance {i}: capacitated {a} vs uncapacitated {b}"));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("capacitated_oracle_infinite_capacity", t, ""))
}
