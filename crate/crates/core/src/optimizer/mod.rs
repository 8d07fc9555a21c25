//! Inexact normalized gradient descent driven by one-bit gradient estimates.

mod config;
mod line_search;
mod machine;
mod run;
mod step;
mod theory;

pub use config::{Budget, ScoboConfig};
pub use line_search::{line_search, warm_line_search, Probe, SearchOutcome, StepSearch};
pub use machine::{iteration_rng, IterationReport, Query, QueryKind, ScoboMachine};
pub use run::{flipped_fraction, record_iteration, scobo_run, IterationRecord, RunTrace, TRACE_COLUMNS};
pub use step::{SearchParams, StepPolicy, DEFAULT_MAX_EXPANSIONS};
pub use theory::{accuracy_floor, rho_star, theory_params, TheoryParams};
