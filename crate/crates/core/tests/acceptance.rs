//! Acceptance suite: one line per criterion, then the verdict.
//!
//! Run with `cargo test -p diraclab-core --release --test acceptance -- --nocapture`.
//!
//! Two criteria cannot hold as stated and are reported as FAIL without
//! failing the test run:
//! - criterion 5, boundary-value clause: `K1 - K2` at `u = 0` equals `2λ`
//!   exactly, so it is never within 0.05 of `λ`;
//! - criterion 7, single-end swaps: the cylinder trace difference tends to
//!   `½(s1 - s2)`, not `s1 - s2`.
//!
//! Every other check must pass.

use diraclab_core::validation::{self, CriterionReport};
use std::time::{Duration, Instant};

/// Checks known not to hold, by criterion and check-name prefix.
const KNOWN_UNATTAINABLE: &[(u32, &str)] =
    &[(5, "boundary value"), (7, "single-end-0: constant"), (7, "single-end-1: constant")];

fn is_known(id: u32, name: &str) -> bool {
    KNOWN_UNATTAINABLE.iter().any(|&(k, prefix)| k == id && name.starts_with(prefix))
}

fn timed<F: FnOnce() -> diraclab_core::Result<CriterionReport>>(f: F) -> (CriterionReport, Duration) {
    let start = Instant::now();
    let r = f().expect("criterion ran");
    (r, start.elapsed())
}

#[test]
fn acceptance() {
    let runs: Vec<(CriterionReport, Duration, Option<Duration>)> = vec![
        {
            let (r, d) = timed(validation::theorem_one);
            (r, d, Some(Duration::from_secs(10)))
        },
        { let (r, d) = timed(validation::local_density_mass); (r, d, None) },
        { let (r, d) = timed(validation::aps_density_mass); (r, d, None) },
        { let (r, d) = timed(validation::mckean_singer); (r, d, None) },
        { let (r, d) = timed(validation::robin_kernels); (r, d, None) },
        { let (r, d) = timed(validation::adjointness); (r, d, None) },
        { let (r, d) = timed(validation::isospectrality); (r, d, None) },
        {
            let (r, d) = timed(validation::family_index);
            (r, d, Some(Duration::from_secs(60)))
        },
    ];

    let mut unexpected = Vec::new();
    for (report, elapsed, budget) in &runs {
        let within = budget.map_or(true, |b| *elapsed < b);
        let passed = report.passed && within;
        let timing = match budget {
            Some(b) => format!("  [{:.2} s, budget {} s]", elapsed.as_secs_f64(), b.as_secs()),
            None => String::new(),
        };
        let line = report.summary_line().replacen(
            if report.passed { "PASS" } else { "FAIL" },
            if passed { "PASS" } else { "FAIL" },
            1,
        );
        println!("{line}{timing}");
        for c in &report.checks {
            if !c.passed {
                println!("    {}: {}", c.name, c.detail);
                if !is_known(report.id, &c.name) {
                    unexpected.push(format!("criterion {}: {}", report.id, c.name));
                }
            }
        }
        if !within {
            unexpected.push(format!("criterion {}: runtime {:.2} s", report.id, elapsed.as_secs_f64()));
        }
    }

    let first = validation::run_all().expect("suite ran").to_json();
    let second = validation::run_all().expect("suite ran").to_json();
    let deterministic = first == second;
    println!(
        "criterion 9  {}  repeated validation reports are byte-identical",
        if deterministic { "PASS" } else { "FAIL" }
    );
    if !deterministic {
        unexpected.push("criterion 9".into());
    }

    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
