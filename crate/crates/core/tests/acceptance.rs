//! Runs the acceptance criteria and prints one PASS/FAIL line for each.
//!
//! `ACCEPTANCE_CRITERIA=1,5,8` restricts the run; `ACCEPTANCE_VERBOSE=1`
//! prints the per-criterion details as well.

use std::process::ExitCode;
use std::time::Instant;

use dtasep_core::acceptance;

fn main() -> ExitCode {
    let ids: Vec<u8> = std::env::var("ACCEPTANCE_CRITERIA")
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let started = Instant::now();
    let mut failed = 0;
    for id in 1..=8u8 {
        if !ids.is_empty() && !ids.contains(&id) {
            continue;
        }
        let t = Instant::now();
        match acceptance::run(&[id]) {
            Ok(reports) => {
                for report in reports {
                    println!("{report} ({:.1}s)", t.elapsed().as_secs_f64());
                    if verbose || !report.pass {
                        for line in &report.details {
                            println!("    {line}");
                        }
                    }
                    failed += usize::from(!report.pass);
                }
            }
            Err(e) => {
                println!("[FAIL] criterion {id}: error: {e}");
                failed += 1;
            }
        }
    }
    println!(
        "acceptance: {} failed ({:.0}s)",
        failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
