//! Acceptance criteria, one line each.
//!
//! 6b compares the tabulated equilibria with ones recomputed from the
//! rounded tabulated parameters. Rows 1 and 2 miss by more than rounding
//! explains, so 6b is the one expected failure.

use std::collections::BTreeSet;

use coexist::checks::{self, Check};

const EXPECTED_FAILURES: [&str; 1] = ["6b"];

fn main() {
    let criteria: [fn() -> Check; 13] = [
        checks::criterion_1,
        checks::criterion_2,
        checks::criterion_3,
        checks::criterion_4,
        checks::criterion_5,
        checks::criterion_6a,
        checks::criterion_6b,
        checks::criterion_6c,
        checks::criterion_7a,
        checks::criterion_7b,
        checks::criterion_7c,
        checks::criterion_7d,
        checks::criterion_8,
    ];
    let mut failed: BTreeSet<String> = BTreeSet::new();
    for criterion in criteria {
        let c = criterion();
        println!("{}", c.line());
        if !c.passed {
            failed.insert(c.id.to_string());
        }
    }
    let passed = criteria.len() - failed.len();
    println!("{passed} passed, {} failed", failed.len());
    let expected: BTreeSet<String> = EXPECTED_FAILURES.iter().map(|s| s.to_string()).collect();
    if failed != expected {
        eprintln!("expected failures {expected:?}, got {failed:?}");
        std::process::exit(1);
    }
}
