use super::instances::{small, Limits, KINDS};
use super::{par_tally, Options, Outcome, Tally};
use crate::error::Result;
use crate::prize_collecting::{default_solver, ExactPc, PenaltyInstance, PrizeCollectingSolver};
use crate::scalar::{Extended, Scalar};
use crate::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LIMITS: Limits = Limits { max_requests: 8, max_predictions: 10 };

/// The predictions of a small instance as a penalty instance, with a
/// random penalty in `[1/4, 16]`.
fn penalty_instance(i: usize, seed: u64) -> Result<(super::instances::Small, PenaltyInstance<Exact>)> {
    let kind = KINDS[i % 3];
    let s = small(kind, seed, LIMITS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
    let x = Exact::from_ratio(rng.gen_range(1..=64), 4);
    let inst = PenaltyInstance::new(&s.graph, kind, s.predictions.items.clone(), Extended::Finite(x), s.root)?;
    Ok((s, inst))
}

pub fn self_consistency(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(60, 300), |i| {
        let (s, inst) = penalty_instance(i, opts.seed_for(30, i))?;
        let mut t = Tally::default();
        let approx = default_solver::<Exact>(s.kind);
        for solver in [approx.as_ref(), &ExactPc as &dyn PrizeCollectingSolver<Exact>] {
            let sol = solver.solve(&s.graph, &inst)?;
            let verdict = sol.verify(&s.graph, &inst);
            t.check(verdict.is_ok(), || format!("instance {i} {}: {}", solver.name(), verdict.unwrap_err()));
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("pc_self_consistency", t, ""))
}

pub fn approximation(opts: &Options) -> Result<Outcome> {
    // 3 kinds interleaved, so at least 200 per problem at full scale
    let t = par_tally(opts.count(60, 600), |i| {
        let (s, inst) = penalty_instance(i, opts.seed_for(31, i))?;
        let solver = default_solver::<Exact>(s.kind);
        let approx = solver.solve(&s.graph, &inst)?;
        let exact = ExactPc.solve(&s.graph, &inst)?;
        let gamma = Exact::from_count(solver.gamma() as usize);
        let bound = match &exact.objective {
            Extended::Finite(x) => Extended::Finite(gamma * x.clone()),
            Extended::Infinite => Extended::Infinite,
        };
        let mut t = Tally::default();
        t.check(exact.objective <= approx.objective, || format!("instance {i}: exact above {}", solver.name()));
        t.check(approx.objective <= bound, || {
            format!("instance {i} {}: {} > {} x {}", solver.name(), approx.objective, solver.gamma(), exact.objective)
        });
        Ok(t)
    })?;
    Ok(Outcome::from_tally("pc_approximation", t, ""))
}

pub fn exact_penalty_monotone(opts: &Options) -> Result<Outcome> {
    let t = par_tally(opts.count(40, 200), |i| {
        let (s, inst) = penalty_instance(i, opts.seed_for(32, i))?;
        let mut t = Tally::default();
        let mut prev: Option<usize> = None;
        for e in -3..=6 {
            let sol = ExactPc.solve(&s.graph, &inst.with_penalty(Extended::Finite(Exact::pow2(e))))?;
            let u = sol.unsatisfied_count();
            if let Some(p) = prev {
                t.check(u <= p, || format!("instance {i}: penalty 2^{e} leaves {u} > {p} unsatisfied"));
            }
            prev = Some(u);
        }
        Ok(t)
    })?;
    Ok(Outcome::from_tally("pc_exact_penalty_monotone", t, ""))
}
