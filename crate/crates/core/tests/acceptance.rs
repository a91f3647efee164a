//! One line per acceptance criterion, at full scale.

use netpred_core::suites::framework::ACCEPTANCE_SEED;
use netpred_core::suites::{criterion_checks, find, Options};
use std::time::Instant;

const TITLES: [&str; 12] = [
    "Partial bi-criteria",
    "framework structure",
    "B^ bound",
    "subset-competitiveness",
    "FL amortization",
    "FL potential stability",
    "BC structure",
    "capacitated reduction",
    "scale-freeness",
    "error-vs-ratio trend",
    "adversary regressions",
    "frontier oracle equivalence",
];

#[test]
fn acceptance() {
    println!();
    let opts = Options::full(ACCEPTANCE_SEED);
    let mut failed = Vec::new();
    for c in 1..=12u8 {
        let start = Instant::now();
        let outcomes: Vec<_> = criterion_checks(c).iter().map(|n| find(n).expect("registered").execute(&opts)).collect();
        let passed = outcomes.iter().all(|o| o.passed);
        let cases: usize = outcomes.iter().map(|o| o.cases).sum();
        println!(
            "criterion {c:>2} {} {} ({cases} cases, {:.1}s)",
            if passed { "PASS" } else { "FAIL" },
            TITLES[c as usize - 1],
            start.elapsed().as_secs_f64()
        );
        for o in &outcomes {
            println!("    {o}");
        }
        if !passed {
            failed.push(c);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
