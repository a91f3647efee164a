use num_traits::Zero;
use super::{par_tally, Options, Outcome, Tally};
use crate::adversaries::nk_delta::cardinalities;
use crate::adversaries::{
    diamond_adversary, fotakis_lb_run, matching_lb_run, nk_delta_adversary, DiamondInstance, GreedyMatcher, NkVariant,
};
use crate::engines::{Fotakis, GreedyTree};
use crate::error::{Error, Result};
use crate::graph::ZeroCostOverlay;
use crate::request::DemandKind;
use crate::scalar::Scalar;
use crate::Exact;

pub fn diamond_counts(_: &Options) -> Result<Outcome> {
    let mut t = Tally::default();
    for i in 0..=4u32 {
        let inst = DiamondInstance::<Exact>::new(i);
        t.check(inst.graph.edge_count() == 4usize.pow(i), || format!("I_{i} has {} edges", inst.graph.edge_count()));
        let run = diamond_adversary::<Exact>(i)?;
        let r = run.transcript.steps.len();
        t.check(r == 1 << i, || format!("I_{i} issued {r} requests"));
    }
    Ok(Outcome::from_tally("diamond_counts", t, ""))
}

pub fn diamond_ratio_increasing(_: &Options) -> Result<Outcome> {
    let mut t = Tally::default();
    let mut ratios = Vec::new();
    for i in 1..=4u32 {
        let run = diamond_adversary::<Exact>(i)?;
        t.check(run.opt_certified, || format!("I_{i}: path optimum not certified"));
        if let Some(x) = &run.exact_opt {
            t.check(*x == run.opt, || format!("I_{i}: oracle {x} vs path {}", run.opt));
        }
        ratios.push(run.ratio());
    }
    for w in ratios.windows(2) {
        t.check(w[1] > w[0], || format!("ratios {ratios:?} not increasing"));
    }
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok(Outcome::from_tally("diamond_ratio_increasing", t, format!("ratios {}", shown.join(", "))))
}

pub fn nk_delta_cardinalities(opts: &Options) -> Result<Outcome> {
    let top = opts.count(5, 8);
    let mut grid = Vec::new();
    for kind in [DemandKind::Terminal, DemandKind::Client] {
        for variant in [NkVariant::Unpredicted, NkVariant::Intersection] {
            for n in 1..=top {
                for k in 1..=top {
                    for d1 in 0..=n {
                        for d2 in 0..=k {
                            grid.push((kind, variant, n, k, d1, d2));
                        }
                    }
                }
            }
        }
    }
    let t = par_tally(grid.len(), |i| {
        let (kind, variant, n, k, d1, d2) = grid[i];
        let mut t = Tally::default();
        let inst = match nk_delta_adversary::<Exact>(n, k, d1, d2, kind, variant) {
            Ok(inst) => inst,
            Err(Error::Parameter(_)) => return Ok(t),
            Err(e) => return Err(e),
        };
        let transcript = match kind {
            DemandKind::Terminal => {
                let root = inst.root.unwrap_or(0);
                inst.play(&mut GreedyTree::new(&inst.graph, root, ZeroCostOverlay::new(&inst.graph))?)?
            }
            _ => inst.play(&mut Fotakis::new(&inst.graph, ZeroCostOverlay::new(&inst.graph))?)?,
        };
        let got = cardinalities(&transcript.requests(), &inst.predictions);
        t.check(got == (n, k, d1, d2), || format!("{kind:?} {variant:?} ({n}, {k}, {d1}, {d2}) produced {got:?}"));
        Ok(t)
    })?;
    Ok(Outcome::from_tally("nk_delta_cardinalities", t, ""))
}

pub fn fotakis_lb_pattern(opts: &Options) -> Result<Outcome> {
    let mut t = Tally::default();
    let mut shown = Vec::new();
    for m in 2..=opts.count(3, 4) as u32 {
        let run = fotakis_lb_run::<Exact>(m)?;
        t.check(run.phases.len() == m as usize + 1, || format!("m={m}: {} phases", run.phases.len()));
        t.check(run.facility_per_phase(), || format!("m={m}: openings {:?}", run.phases));
        t.check(run.potential_violations == 0, || format!("m={m}: potential above facility cost"));
        t.check(run.alpha_total >= run.actual_total, || format!("m={m}: amortized below actual"));
        if let Some(full) = &run.opt_full {
            t.check(*full == run.opt, || format!("m={m}: oracle {full} vs path optimum {}", run.opt));
        }
        shown.push(format!("m={m}: ALG/OPT {:.3}", (run.actual_total.clone() / run.opt.clone()).as_f64()));
    }
    Ok(Outcome::from_tally("fotakis_lb_pattern", t, shown.join(", ")))
}

pub fn matching_lb(_: &Options) -> Result<Outcome> {
    let mut t = Tally::default();
    for k in [2usize, 4, 8] {
        let run = matching_lb_run::<Exact>(k, &mut GreedyMatcher)?;
        let two = Exact::from_count(2);
        t.check(run.alg == Exact::from_count(2 * k), || format!("k={k}: ALG {}", run.alg));
        t.check(run.opt == two, || format!("k={k}: OPT {}", run.opt));
        t.check(run.frontier.contains(2, &Exact::zero()), || format!("k={k}: (2, 0) not on the frontier"));
    }
    Ok(Outcome::from_tally("matching_lb", t, ""))
}
