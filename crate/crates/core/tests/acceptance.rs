//! Acceptance criteria: runs the full verification matrix, prints one
//! PASS/FAIL line per criterion and asserts every criterion not listed as
//! known unattainable.

use std::io::Write;

use sst_core::verify::{verify_suite_with, Suite, VerifyOptions, CRITERIA, KNOWN_UNATTAINABLE};

/// Writes directly to stderr, bypassing the harness output capture.
fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

#[test]
fn acceptance_matrix() {
    let opts = VerifyOptions {
        suite: Suite::Full,
        ..Default::default()
    };
    let report = verify_suite_with(&opts, |c| say(&c.render()));
    assert_eq!(report.criteria.len(), CRITERIA);
    let mut failed = Vec::new();
    for c in &report.criteria {
        let line = format!("{} criterion {}", if c.pass { "PASS" } else { "FAIL" }, c.id);
        say(&line);
        if !c.pass && !(c.expected_failure && KNOWN_UNATTAINABLE.contains(&c.id)) {
            failed.push(c.id);
        }
    }
    for id in KNOWN_UNATTAINABLE {
        let c = &report.criteria[id - 1];
        for check in c.checks.iter().filter(|k| k.known_unattainable) {
            say(&format!(
                "criterion {id} known unattainable check '{}': {} = {:.6e}",
                check.label,
                if check.pass { "PASS" } else { "FAIL" },
                check.value
            ));
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert!(report.pass);
}
