//! `scobo` command-line front end: run, sweep and validate.
//!
//! Exit codes: 0 success, 1 validation or run failure, 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scobo::benchmarks::CaseId;
use scobo::experiments::{run_batch, ExperimentConfig, SummaryRow};
use scobo::validation::{run_all, Scale};
use scobo::Error;

#[derive(Parser)]
#[command(name = "scobo", version, about = "Comparison-oracle optimization with one-bit gradient estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one benchmark case and write traces plus summary.csv.
    Run {
        /// Case to run (a, b, c or d).
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run several cases with every step variant into one directory.
    Sweep {
        /// Comma-separated cases.
        #[arg(long, default_value = "a,b,c,d")]
        cases: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the acceptance checks and print one line per check.
    Validate {
        /// Tenfold smaller Monte Carlo sizes with looser tolerances.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Step variants, comma-separated: fs, ls, wsls.
    #[arg(long)]
    variant: Option<String>,
    /// Seeds as an inclusive range "0..4" or a list "1,2,3".
    #[arg(long, env = "SCOBO_SEED")]
    seeds: Option<String>,
    /// Oracle queries per run.
    #[arg(long)]
    budget: Option<u64>,
    /// Measurements per gradient estimate.
    #[arg(long)]
    m: Option<usize>,
    /// Sampling radius.
    #[arg(long)]
    r: Option<f64>,
    /// Fixed step size.
    #[arg(long)]
    alpha: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut o = Vec::new();
        let mut push = |k, v: Option<String>| {
            if let Some(v) = v {
                o.push((k, v));
            }
        };
        push("variant", self.variant.clone());
        push("seeds", self.seeds.clone());
        push("budget", self.budget.map(|v| v.to_string()));
        push("m", self.m.map(|v| v.to_string()));
        push("r", self.r.map(|v| v.to_string()));
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        o
    }

    fn load(&self, case: Option<&str>, all_variants: bool) -> scobo::Result<ExperimentConfig> {
        let mut overrides = Vec::new();
        if let Some(c) = case {
            overrides.push(("case", c.to_string()));
        }
        if all_variants && self.variant.is_none() {
            overrides.push(("variant", "fs,ls,wsls".to_string()));
        }
        overrides.extend(self.overrides());
        ExperimentConfig::load_with_overrides(self.config.as_deref(), &overrides)
    }
}

fn print_summary(rows: &[SummaryRow]) {
    println!("{:<6} {:<5} {:>5} {:>10} {:>14} {:>10}", "case", "var", "seed", "queries", "final_gap", "increases");
    for r in rows {
        let gap = r.final_opt_gap.map_or("-".to_string(), |g| format!("{g:.4e}"));
        println!(
            "{:<6} {:<5} {:>5} {:>10} {:>14} {:>10}",
            r.case, r.variant, r.seed, r.total_queries, gap, r.descent_violations
        );
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } | Error::InvalidArgument(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Validate { quick } => {
            let results = run_all(if quick { Scale::Quick } else { Scale::Full });
            for r in &results {
                println!("{r}");
            }
            let passed = results.iter().filter(|r| r.passed).count();
            println!("{passed}/{} checks passed", results.len());
            if passed == results.len() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Run { case, common } => {
            let config = match common.load(case.as_deref(), false) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match run_batch(std::slice::from_ref(&config), &config.out) {
                Ok(rows) => {
                    print_summary(&rows);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Sweep { cases, common } => {
            let mut configs = Vec::new();
            for c in cases.split(',') {
                if let Err(e) = c.parse::<CaseId>() {
                    return fail(e);
                }
                match common.load(Some(c.trim()), true) {
                    Ok(cfg) => configs.push(cfg),
                    Err(e) => return fail(e),
                }
            }
            let out = configs[0].out.clone();
            match run_batch(&configs, &out) {
                Ok(rows) => {
                    print_summary(&rows);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
