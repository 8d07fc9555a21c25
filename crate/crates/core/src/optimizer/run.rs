use std::io::Write;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::config::ScoboConfig;
use super::machine::{IterationReport, ScoboMachine};
use crate::error::Result;
use crate::objective::Objective;
use crate::oracle::{ComparisonOracle, Sign};

/// Column order of trace CSVs. Stable; append new columns at the end only.
pub const TRACE_COLUMNS: [&str; 7] =
    ["iter", "queries", "step_size", "f_value", "opt_gap", "flipped_frac", "ghat_norm"];

/// One completed iteration. Values after the step, i.e. at `xₖ₊₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: u64,
    pub queries: u64,
    pub step_size: f64,
    pub f_value: Option<f64>,
    pub opt_gap: Option<f64>,
    /// Share of estimation answers disagreeing with `sign(zᵢᵀ∇f(xₖ))`.
    pub flipped_frac: Option<f64>,
    pub ghat_norm: f64,
    /// The measurements cancelled and the step was skipped.
    pub skipped: bool,
    /// The line search hit its cap or the query budget.
    pub search_truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    /// Diagnostic `f(x₀)`.
    pub initial_value: Option<f64>,
    pub records: Vec<IterationRecord>,
    pub final_x: Array1<f64>,
    pub total_queries: u64,
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl RunTrace {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRACE_COLUMNS)?;
        for r in &self.records {
            w.write_record([
                r.iter.to_string(),
                r.queries.to_string(),
                r.step_size.to_string(),
                opt(r.f_value),
                opt(r.opt_gap),
                opt(r.flipped_frac),
                r.ghat_norm.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Diagnostic values `f(x₀), f(x₁), …`; empty without diagnostics.
    pub fn values(&self) -> Vec<f64> {
        self.initial_value
            .into_iter()
            .chain(self.records.iter().map_while(|r| r.f_value))
            .collect()
    }

    /// Iterations where `f(xₖ₊₁) > f(xₖ)`.
    pub fn descent_violations(&self) -> usize {
        self.values().windows(2).filter(|w| w[1] > w[0]).count()
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.opt_gap)
    }

    /// Queries spent when the gap first dropped to `threshold` or below.
    pub fn queries_to_reach(&self, threshold: f64) -> Option<u64> {
        self.records.iter().find(|r| r.opt_gap.is_some_and(|g| g <= threshold)).map(|r| r.queries)
    }

    /// Mean flipped fraction across iterations that recorded one.
    pub fn mean_flipped_fraction(&self) -> Option<f64> {
        let f: Vec<f64> = self.records.iter().filter_map(|r| r.flipped_frac).collect();
        (!f.is_empty()).then(|| f.iter().sum::<f64>() / f.len() as f64)
    }
}

/// Fraction of answers that disagree with `sign(zᵢᵀ g)`; directions
/// orthogonal to `g` are left out.
pub fn flipped_fraction(report: &IterationReport, gradient: &Array1<f64>) -> Option<f64> {
    let proj = report.directions.query_directions().dot(gradient);
    let (mut flipped, mut counted) = (0usize, 0usize);
    for (p, a) in proj.iter().zip(&report.answers) {
        if let Some(truth) = Sign::of(*p) {
            counted += 1;
            if truth != *a {
                flipped += 1;
            }
        }
    }
    (counted > 0).then(|| flipped as f64 / counted as f64)
}

/// Turn an iteration report into a trace row, with diagnostics if available.
pub fn record_iteration(
    report: &IterationReport,
    x_after: ndarray::ArrayView1<'_, f64>,
    diagnostics: Option<&dyn Objective>,
) -> IterationRecord {
    let f_value = diagnostics.map(|f| f.value(x_after));
    let opt_gap = diagnostics.and_then(|f| Some(f_value? - f.min_value()?));
    let flipped_frac = diagnostics
        .and_then(|f| f.gradient(report.x_before.view()))
        .and_then(|g| flipped_fraction(report, &g));
    IterationRecord {
        iter: report.iteration,
        queries: report.queries,
        step_size: report.step_size,
        f_value,
        opt_gap,
        flipped_frac,
        ghat_norm: report.estimate.norm(),
        skipped: report.estimate.degenerate,
        search_truncated: report.search.is_some_and(|s| s.truncated),
    }
}

/// Run SCOBO from `x0` against `oracle` until the budget is spent.
///
/// `diagnostics` only feeds the trace; the iterates never depend on it.
pub fn scobo_run<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    config: &ScoboConfig,
    x0: Array1<f64>,
    diagnostics: Option<&dyn Objective>,
) -> Result<RunTrace> {
    if x0.len() != oracle.dim() {
        return Err(crate::Error::DimensionMismatch { expected: oracle.dim(), actual: x0.len() });
    }
    let initial_value = diagnostics.map(|f| f.value(x0.view()));
    let mut machine = ScoboMachine::new(config.clone(), x0)?;
    let mut records = Vec::new();
    while let Some(q) = machine.pending_query() {
        let answer = oracle.query(q.x.view(), q.y.view())?;
        if let Some(report) = machine.answer(answer)? {
            records.push(record_iteration(&report, machine.x(), diagnostics));
        }
    }
    Ok(RunTrace {
        initial_value,
        records,
        final_x: machine.x().to_owned(),
        total_queries: machine.queries(),
    })
}
