//! Runs every acceptance criterion at its stated tolerance and time limit,
//! printing one pass/fail line per criterion.

use std::io::Write;

use semicong::acceptance::run_suite;

#[test]
fn acceptance_all() {
    let seed = std::env::var("SEMICONG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let report = run_suite("all", seed).expect("suite runs");
    // Written to the raw handle so the lines show even when output is
    // captured.
    let mut err = std::io::stderr().lock();
    for c in &report.criteria {
        writeln!(err, "{}", c.line()).unwrap();
    }
    let failed: Vec<u8> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
