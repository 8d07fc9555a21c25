//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;

use scobo::validation::{run_all, Scale};

fn main() -> ExitCode {
    let quick = std::env::args().any(|a| a == "--quick");
    let results = run_all(if quick { Scale::Quick } else { Scale::Full });
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
