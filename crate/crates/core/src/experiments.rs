//! Batch runs of the benchmark cases: configuration, traces and summaries.
//!
//! Configuration files are flat `key = value` lines; `#` starts a comment.
//! The keys are those of [`CaseSpec::to_config_string`] plus `name`,
//! `variant`, `seeds`, `budget` and `out`. A `case` line, wherever it
//! appears, selects the base case the remaining keys modify.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{make_case, BenchmarkFunction, CaseId, CaseSpec, StepVariant};
use crate::error::{Error, Result};
use crate::estimator::practical_m;
use crate::optimizer::{Budget, RunTrace};
use crate::oracle::OracleParams;

pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Label used in file names and the summary; defaults to the case id.
    pub name: String,
    pub spec: CaseSpec,
    pub variants: Vec<StepVariant>,
    pub seeds: Vec<u64>,
    /// Query budget per run.
    pub budget: u64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn for_case(id: CaseId) -> Self {
        Self {
            name: id.to_string(),
            spec: make_case(id),
            variants: vec![StepVariant::Fs],
            seeds: vec![0],
            budget: DEFAULT_BUDGET,
            out: PathBuf::from("results"),
        }
    }

    /// Parse a configuration file's text.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_overrides(text, &[])
    }

    /// Parse a configuration file, then apply `(key, value)` overrides on
    /// top; overrides win. Override errors are reported against the key.
    pub fn parse_with_overrides(text: &str, overrides: &[(&str, String)]) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config { line: i + 1, message: format!("expected 'key = value', got '{line}'") });
            };
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        pairs.extend(overrides.iter().map(|(k, v)| (0, k.to_string(), v.clone())));
        // The last `case` wins and is applied first, so other keys modify it.
        let base = match pairs.iter().rev().find(|p| p.1 == "case") {
            Some((line, _, v)) => v.parse().map_err(|e: Error| Error::Config {
                line: *line,
                message: if *line == 0 { format!("--case: {e}") } else { e.to_string() },
            })?,
            None => CaseId::C,
        };
        let mut config = Self::for_case(base);
        let mut explicit_m = false;
        for (line, k, v) in pairs.iter().filter(|p| p.1 != "case") {
            explicit_m |= k == "m";
            config.set(k, v).map_err(|message| Error::Config {
                line: *line,
                message: if *line == 0 { format!("--{}: {message}", k.replace('_', "-")) } else { message },
            })?;
        }
        config.finish(explicit_m).map_err(|e| Error::Config { line: 0, message: e.to_string() })?;
        Ok(config)
    }

    pub fn load_with_overrides(path: Option<&Path>, overrides: &[(&str, String)]) -> Result<Self> {
        let text = match path {
            Some(p) => fs::read_to_string(p)?,
            None => String::new(),
        };
        Self::parse_with_overrides(&text, overrides)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("'{key}' expects a number, got '{v}'"))
        }
        let spec = &mut self.spec;
        match key {
            "case" => {
                let id: CaseId = value.parse().map_err(|e: Error| e.to_string())?;
                if id != spec.id {
                    *spec = make_case(id);
                    self.name = id.to_string();
                }
            }
            "name" => {
                if value.is_empty() || value.contains(['/', '\\']) {
                    return Err(format!("'name' must be a plain file-name fragment, got '{value}'"));
                }
                self.name = value.to_string();
            }
            "objective" => {
                spec.function = BenchmarkFunction::by_name(value, spec.s, spec.d).map_err(|e| e.to_string())?;
            }
            "s" => spec.s = num(key, value)?,
            "d" => spec.d = num(key, value)?,
            "kappa" => spec.oracle.kappa = num(key, value)?,
            "mu" => spec.oracle.mu = num(key, value)?,
            "delta0" => spec.oracle.delta0 = num(key, value)?,
            "m" => spec.m = num(key, value)?,
            "r" => spec.r = num(key, value)?,
            "alpha" => spec.alpha = num(key, value)?,
            "ls_alpha_def" => spec.line_search.alpha_default = num(key, value)?,
            "ls_trials" => spec.line_search.trials = num(key, value)?,
            "ls_omega" => spec.line_search.omega = num(key, value)?,
            "ls_psi" => spec.line_search.psi = num(key, value)?,
            "wsls_alpha_def" => spec.warm_line_search.alpha_default = num(key, value)?,
            "wsls_trials" => spec.warm_line_search.trials = num(key, value)?,
            "wsls_omega" => spec.warm_line_search.omega = num(key, value)?,
            "wsls_psi" => spec.warm_line_search.psi = num(key, value)?,
            "x0" => spec.x0_value = num(key, value)?,
            "variant" => {
                self.variants = value
                    .split(',')
                    .map(|v| v.parse::<StepVariant>().map_err(|e| e.to_string()))
                    .collect::<std::result::Result<_, _>>()?;
                self.variants.dedup();
            }
            "seeds" => self.seeds = parse_seeds(value)?,
            "budget" => self.budget = num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Rebuild derived fields after edits and validate the result.
    pub fn finish(&mut self, explicit_m: bool) -> Result<()> {
        let spec = &mut self.spec;
        if spec.s == 0 || spec.s > spec.d {
            return Err(Error::invalid(format!("need 1 <= s ({}) <= d ({})", spec.s, spec.d)));
        }
        spec.function = BenchmarkFunction::by_name(spec.function.name(), spec.s, spec.d)?;
        if !explicit_m {
            spec.m = practical_m(spec.s, spec.d)?;
        }
        spec.oracle = OracleParams::new(spec.oracle.delta0, spec.oracle.mu, spec.oracle.kappa)?;
        if !spec.x0_value.is_finite() {
            return Err(Error::invalid("x0 must be finite"));
        }
        if self.variants.is_empty() || self.seeds.is_empty() {
            return Err(Error::invalid("need at least one variant and one seed"));
        }
        for v in StepVariant::ALL {
            spec.scobo_config(v, Budget::Queries(self.budget), 0).validate(spec.d)?;
        }
        Ok(())
    }

    /// The configuration as a file that parses back to the same value.
    pub fn to_config_string(&self) -> String {
        let variants: Vec<String> = self.variants.iter().map(|v| v.to_string()).collect();
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        format!(
            "{}name = {}\nvariant = {}\nseeds = {}\nbudget = {}\nout = {}\n",
            self.spec.to_config_string(),
            self.name,
            variants.join(","),
            seeds.join(","),
            self.budget,
            self.out.display()
        )
    }

    pub fn trace_file_name(&self, variant: StepVariant, seed: u64) -> String {
        format!("case{}_{variant}_seed{seed}.csv", self.name)
    }
}

/// Parse `"0..4"` (inclusive), `"0..=4"`, or a comma list such as `"1,3,8"`.
pub fn parse_seeds(text: &str) -> std::result::Result<Vec<u64>, String> {
    let text = text.trim();
    let bad = || format!("bad seed list '{text}' (use '0..4' or '1,2,3')");
    let seeds: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<std::result::Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

/// One line of `summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub case: String,
    pub variant: StepVariant,
    pub seed: u64,
    pub total_queries: u64,
    pub final_opt_gap: Option<f64>,
    pub descent_violations: usize,
}

impl SummaryRow {
    pub fn from_trace(case: &str, variant: StepVariant, seed: u64, trace: &RunTrace) -> Self {
        Self {
            case: case.to_string(),
            variant,
            seed,
            total_queries: trace.total_queries,
            final_opt_gap: trace.final_gap(),
            descent_violations: trace.descent_violations(),
        }
    }
}

/// Write through a temporary sibling and rename, so readers never see a
/// half-written file.
fn write_atomically(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["case", "variant", "seed", "total_queries", "final_opt_gap", "descent_violations"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomically(path, &bytes)
}

/// Run every (variant, seed) pair of each configuration in parallel, write
/// one trace CSV per run and a combined `summary.csv` into `out`.
pub fn run_batch(configs: &[ExperimentConfig], out: &Path) -> Result<Vec<SummaryRow>> {
    fs::create_dir_all(out)?;
    let jobs: Vec<(&ExperimentConfig, StepVariant, u64)> = configs
        .iter()
        .flat_map(|c| c.variants.iter().flat_map(move |v| c.seeds.iter().map(move |s| (c, *v, *s))))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(config, variant, seed)| {
            let trace = config.spec.run(variant, Budget::Queries(config.budget), seed)?;
            write_atomically(&out.join(config.trace_file_name(variant, seed)), trace.to_csv_string().as_bytes())?;
            Ok(SummaryRow::from_trace(&config.name, variant, seed, &trace))
        })
        .collect::<Result<Vec<_>>>()?;
    write_summary(&out.join("summary.csv"), &rows)?;
    Ok(rows)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<SummaryRow>> {
    run_batch(std::slice::from_ref(config), &config.out)
}
