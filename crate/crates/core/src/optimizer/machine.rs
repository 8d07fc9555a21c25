//! SCOBO as a resumable state machine: emit the next comparison, consume
//! its answer.
//!
//! Each iteration first asks `m` estimation queries `(xₖ, xₖ + r zᵢ)`,
//! recovers `ĝₖ`, picks `αₖ` (possibly through line-search comparisons) and
//! moves to `xₖ₊₁ = xₖ − αₖĝₖ`. Nothing here blocks on an answer, so a human
//! oracle can sit behind the same loop that drives simulations.

use ndarray::{Array1, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Budget, ScoboConfig};
use super::line_search::{SearchOutcome, StepSearch};
use super::step::StepPolicy;
use crate::error::{Error, Result};
use crate::estimator::{estimate_from_answers, sample_directions, DirectionSet, GradientEstimate};
use crate::oracle::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Estimation,
    LineSearch,
}

/// A pending comparison: the answer is `sign(f(y) − f(x))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub x: Array1<f64>,
    pub y: Array1<f64>,
    pub kind: QueryKind,
}

/// Everything that happened in one completed iteration.
#[derive(Clone, Debug)]
pub struct IterationReport {
    pub iteration: u64,
    pub x_before: Array1<f64>,
    pub step_size: f64,
    pub estimate: GradientEstimate,
    pub directions: DirectionSet,
    pub answers: Vec<Sign>,
    /// Cumulative answers consumed, this iteration included.
    pub queries: u64,
    pub search: Option<SearchOutcome>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
enum Phase {
    Estimating { directions: DirectionSet, answers: Vec<Sign> },
    Searching { directions: DirectionSet, answers: Vec<Sign>, estimate: GradientEstimate, search: StepSearch },
    Finished,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoboMachine {
    config: ScoboConfig,
    x: Array1<f64>,
    iteration: u64,
    queries: u64,
    last_alpha: Option<f64>,
    phase: Phase,
}

/// Direction stream for iteration `k`: independent of how many answers
/// earlier iterations consumed.
pub fn iteration_rng(seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    rng
}

impl ScoboMachine {
    pub fn new(config: ScoboConfig, x0: Array1<f64>) -> Result<Self> {
        config.validate(x0.len())?;
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("x0 has non-finite entries"));
        }
        let mut machine =
            Self { config, x: x0, iteration: 0, queries: 0, last_alpha: None, phase: Phase::Finished };
        machine.start_iteration()?;
        Ok(machine)
    }

    pub fn config(&self) -> &ScoboConfig {
        &self.config
    }

    pub fn x(&self) -> ArrayView1<'_, f64> {
        self.x.view()
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Index of the iteration in progress (or the count of completed ones).
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.phase, Phase::Finished)
    }

    /// The comparison awaiting an answer, or `None` when the run is over.
    pub fn pending_query(&self) -> Option<Query> {
        match &self.phase {
            Phase::Estimating { directions, answers } => {
                let mut y = self.x.clone();
                y.scaled_add(self.config.r, &directions.query_direction(answers.len()));
                Some(Query { x: self.x.clone(), y, kind: QueryKind::Estimation })
            }
            Phase::Searching { estimate, search, .. } => {
                let probe = search.probe()?;
                let (x, y) = probe.points(self.x.view(), estimate.g_hat.view());
                Some(Query { x, y, kind: QueryKind::LineSearch })
            }
            Phase::Finished => None,
        }
    }

    /// Consume the answer to [`ScoboMachine::pending_query`]. Returns the
    /// report of an iteration if this answer completed one.
    pub fn answer(&mut self, answer: Sign) -> Result<Option<IterationReport>> {
        self.queries += 1;
        match &mut self.phase {
            Phase::Finished => {
                self.queries -= 1;
                Err(Error::invalid("run is finished; no query is pending"))
            }
            Phase::Estimating { directions, answers } => {
                answers.push(answer);
                if answers.len() < directions.len() {
                    return Ok(None);
                }
                let Phase::Estimating { directions, answers } =
                    std::mem::replace(&mut self.phase, Phase::Finished)
                else {
                    unreachable!()
                };
                self.after_estimation(directions, answers)
            }
            Phase::Searching { search, .. } => {
                search.record(answer)?;
                if !search.is_done() {
                    return Ok(None);
                }
                let Phase::Searching { directions, answers, estimate, search } =
                    std::mem::replace(&mut self.phase, Phase::Finished)
                else {
                    unreachable!()
                };
                let outcome = search.outcome().expect("search finished");
                self.complete(directions, answers, estimate, outcome.alpha, Some(outcome)).map(Some)
            }
        }
    }

    fn after_estimation(&mut self, directions: DirectionSet, answers: Vec<Sign>) -> Result<Option<IterationReport>> {
        let estimate = estimate_from_answers(&directions, &answers, self.config.s)?;
        if estimate.degenerate {
            return self.complete(directions, answers, estimate, 0.0, None).map(Some);
        }
        let remaining = match self.config.budget {
            Budget::Queries(q) => Some(q.saturating_sub(self.queries)),
            Budget::Iterations(_) => None,
        };
        let search = match self.config.step {
            StepPolicy::LineSearch(p) => StepSearch::cold(p)?,
            StepPolicy::WarmStartLineSearch(p) => {
                StepSearch::warm(p, self.last_alpha.unwrap_or(p.alpha_default))?
            }
            policy => {
                let alpha = policy.scheduled(self.iteration).expect("scheduled policy");
                return self.complete(directions, answers, estimate, alpha, None).map(Some);
            }
        };
        let search = match remaining {
            Some(r) => search.with_budget(r),
            None => search,
        };
        if let Some(outcome) = search.outcome() {
            return self.complete(directions, answers, estimate, outcome.alpha, Some(outcome)).map(Some);
        }
        self.phase = Phase::Searching { directions, answers, estimate, search };
        Ok(None)
    }

    fn complete(
        &mut self,
        directions: DirectionSet,
        answers: Vec<Sign>,
        estimate: GradientEstimate,
        alpha: f64,
        search: Option<SearchOutcome>,
    ) -> Result<IterationReport> {
        let x_before = self.x.clone();
        if !estimate.degenerate {
            self.x.scaled_add(-alpha, &estimate.g_hat);
            if search.is_some() {
                self.last_alpha = Some(alpha);
            }
        }
        let report = IterationReport {
            iteration: self.iteration,
            x_before,
            step_size: if estimate.degenerate { 0.0 } else { alpha },
            estimate,
            directions,
            answers,
            queries: self.queries,
            search,
        };
        self.iteration += 1;
        self.start_iteration()?;
        Ok(report)
    }

    fn start_iteration(&mut self) -> Result<()> {
        let go = match self.config.budget {
            Budget::Iterations(k) => self.iteration < k,
            Budget::Queries(q) => self.queries + self.config.m as u64 <= q,
        };
        self.phase = if go {
            let mut rng = iteration_rng(self.config.seed, self.iteration);
            let directions = sample_directions(self.dim(), self.config.m, self.config.variant, &mut rng)?;
            Phase::Estimating { directions, answers: Vec::with_capacity(self.config.m) }
        } else {
            Phase::Finished
        };
        Ok(())
    }
}
