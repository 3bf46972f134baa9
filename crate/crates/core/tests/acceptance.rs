//! Runs every acceptance criterion at its stated tolerance and prints one
//! pass/fail line per criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use stable_lab::acceptance::{self, CRITERIA};

fn main() -> ExitCode {
    assert!(acceptance::run(0).is_none() && acceptance::run(11).is_none());
    let mut failed = 0;
    for (id, name, _) in CRITERIA {
        let start = Instant::now();
        let outcome = acceptance::run(id).expect("listed criterion");
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(r) => {
                println!("{r} ({secs:.1}s)");
                failed += usize::from(!r.passed);
            }
            Err(e) => {
                println!("criterion {id:>2} [FAIL] {name}: error: {e} ({secs:.1}s)");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
