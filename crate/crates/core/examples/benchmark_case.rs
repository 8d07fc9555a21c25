//! Run one benchmark case with all three step-size rules and write the
//! per-iteration traces as CSV.
//!
//! `cargo run --release -p scobo --example benchmark_case -- c 30000 out/`

use std::fs::File;
use std::path::PathBuf;

use scobo::benchmarks::{make_case, CaseId, StepVariant};
use scobo::optimizer::Budget;

fn main() -> scobo::Result<()> {
    let mut args = std::env::args().skip(1);
    let case: CaseId = args.next().as_deref().unwrap_or("c").parse()?;
    let budget: u64 = args.next().and_then(|b| b.parse().ok()).unwrap_or(30_000);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "benchmark_out".into()));
    std::fs::create_dir_all(&out)?;

    let spec = make_case(case);
    println!("{}", spec.to_config_string());
    for variant in StepVariant::ALL {
        let trace = spec.run(variant, Budget::Queries(budget), 0)?;
        let path = out.join(format!("case{case}_{variant}.csv"));
        trace.write_csv(File::create(&path)?)?;
        println!(
            "{variant:>4}: {} iterations, {} queries, final gap {:.4}, written to {}",
            trace.records.len(),
            trace.total_queries,
            trace.final_gap().unwrap_or(f64::NAN),
            path.display()
        );
    }
    Ok(())
}
