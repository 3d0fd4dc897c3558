//! The eleven acceptance criteria against the committed fixtures, one
//! pass/fail line each.
//!
//! Lines go straight to stderr so they show without `--nocapture`.

use std::io::Write;

use restriction_lab::fixtures::Fixtures;
use restriction_lab::suites::{criterion, CRITERIA, DEFAULT_SEED};

/// Wall-clock budget per criterion, in seconds.
const BUDGET: [f64; 11] = [60.0, 60.0, 180.0, 180.0, 120.0, 300.0, 300.0, 300.0, 300.0, 300.0, 120.0];

#[test]
fn acceptance() {
    let fx = Fixtures::builtin().expect("built-in fixtures parse");
    let mut failed = Vec::new();
    for (i, title) in CRITERIA.iter().enumerate() {
        let n = i + 1;
        let line = match criterion(n, &fx, DEFAULT_SEED) {
            Ok(rep) => {
                let in_time = rep.seconds < BUDGET[i];
                let ok = rep.passed() && in_time;
                if !ok {
                    failed.push(n);
                }
                let time = if in_time { String::new() } else { format!(", over the {}s budget", BUDGET[i]) };
                format!(
                    "criterion {n:>2} {}  {title} ({:.1}s{time}): {}",
                    if ok { "PASS" } else { "FAIL" },
                    rep.seconds,
                    rep.summary()
                )
            }
            Err(e) => {
                failed.push(n);
                format!("criterion {n:>2} FAIL  {title}: error: {e}")
            }
        };
        writeln!(std::io::stderr(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
