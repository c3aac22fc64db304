//! Acceptance gate: runs every shipped criterion at its stated tolerance
//! and prints one pass/fail line per check (visible with --nocapture).

use optomech_cli::acceptance::{format_lines, run};

#[test]
fn acceptance_suite_passes() {
    let results = run(None);
    assert!(!results.is_empty());
    for line in format_lines(&results) {
        println!("{line}");
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.criterion_id.as_str())
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn every_criterion_group_is_represented() {
    let results = run(None);
    for prefix in [
        "T2", "NA1", "CRIT", "XORACLE", "PEAKS6", "PEAKS7", "VAC", "RWA", "DECOMP", "AUDIT",
        "STAB", "BLOCK", "CHAIN",
    ] {
        assert!(
            results.iter().any(|r| r.criterion_id.starts_with(prefix)),
            "criterion group {prefix} missing from the suite"
        );
    }
}

#[test]
fn runtime_budgets_hold() {
    let results = run(None);
    for r in results.iter().filter(|r| r.criterion_id.ends_with(".runtime")) {
        assert!(r.pass, "{} took {:.1} ms (budget {:.0} ms)", r.criterion_id, r.observed, r.expected);
    }
}
