use netpred_core::suites::{registry, Options};
use std::time::Instant;

#[test]
fn every_check_passes_at_quick_scale() {
    let opts = Options::quick(7);
    let mut failed = Vec::new();
    for check in registry() {
        let start = Instant::now();
        let out = check.execute(&opts);
        println!("{out} [{:.2}s]", start.elapsed().as_secs_f64());
        if !out.passed {
            failed.push(check.name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
