//! Comparison-only line searches along the descent ray `x − αĝ`.
//!
//! Both searches are written as a resumable [`StepSearch`] that emits one
//! [`Probe`] at a time and consumes the answers to it, so the same code runs
//! against a simulated oracle or a human answering over the network.
//!
//! The cold search starts at `α_def` and multiplies by `ψ` while the farther
//! point is confidently better:
//!
//! ```text
//! while C^M(x − αĝ, x − ψαĝ) ≤ −ω:  α ← ψα
//! ```
//!
//! The warm search starts from the previous step. If that step is confidently
//! good it extends as above; if confidently bad it shrinks by `ψ` (never below
//! `α_def`) and returns the first shrunk step that was not confidently bad.

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::step::SearchParams;
use crate::error::{Error, Result};
use crate::oracle::{ComparisonOracle, Sign, TrialScore};

/// One comparison between the points `x − near·ĝ` and `x − far·ĝ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub near: f64,
    pub far: f64,
}

impl Probe {
    pub fn points(&self, x: ArrayView1<'_, f64>, g_hat: ArrayView1<'_, f64>) -> (Array1<f64>, Array1<f64>) {
        let mut a = x.to_owned();
        a.scaled_add(-self.near, &g_hat);
        let mut b = x.to_owned();
        b.scaled_add(-self.far, &g_hat);
        (a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
enum Stage {
    /// Compare `α` against `ψα`.
    Extend,
    /// Warm start: compare `0` against `α`.
    Classify,
    /// Warm start: compare `0` against a shrunk candidate.
    Shrink { candidate: f64 },
    Done,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub alpha: f64,
    /// The expansion/shrink cap or the query budget stopped the search.
    pub truncated: bool,
    pub queries: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSearch {
    params: SearchParams,
    alpha: f64,
    stage: Stage,
    sum: i64,
    answered: u32,
    moves: u32,
    truncated: bool,
    queries: u64,
    budget: Option<u64>,
}

impl StepSearch {
    /// Cold search starting from `α_def`.
    pub fn cold(params: SearchParams) -> Result<Self> {
        params.validate()?;
        Ok(Self::with_stage(params, params.alpha_default, Stage::Extend))
    }

    /// Warm search starting from `alpha_init ≥ α_def`.
    pub fn warm(params: SearchParams, alpha_init: f64) -> Result<Self> {
        params.validate()?;
        if !(alpha_init >= params.alpha_default && alpha_init.is_finite()) {
            return Err(Error::invalid(format!(
                "warm start {alpha_init} must be at least alpha_def {}",
                params.alpha_default
            )));
        }
        Ok(Self::with_stage(params, alpha_init, Stage::Classify))
    }

    fn with_stage(params: SearchParams, alpha: f64, stage: Stage) -> Self {
        Self {
            params,
            alpha,
            stage,
            sum: 0,
            answered: 0,
            moves: 0,
            truncated: false,
            queries: 0,
            budget: None,
        }
    }

    /// Stop before any comparison that would push past `queries` answers.
    pub fn with_budget(mut self, queries: u64) -> Self {
        self.budget = Some(queries);
        self.check_budget();
        self
    }

    pub fn current_alpha(&self) -> f64 {
        self.alpha
    }

    pub fn trials(&self) -> u32 {
        self.params.trials
    }

    pub fn is_done(&self) -> bool {
        self.stage == Stage::Done
    }

    /// The comparison currently awaiting answers.
    pub fn probe(&self) -> Option<Probe> {
        let a = self.alpha;
        match self.stage {
            Stage::Extend => Some(Probe { near: a, far: self.params.psi * a }),
            Stage::Classify => Some(Probe { near: 0.0, far: a }),
            Stage::Shrink { candidate } => Some(Probe { near: 0.0, far: candidate }),
            Stage::Done => None,
        }
    }

    pub fn outcome(&self) -> Option<SearchOutcome> {
        self.is_done().then_some(SearchOutcome {
            alpha: self.alpha,
            truncated: self.truncated,
            queries: self.queries,
        })
    }

    /// Feed one answer to the current probe.
    pub fn record(&mut self, answer: Sign) -> Result<()> {
        if self.is_done() {
            return Err(Error::invalid("line search already finished"));
        }
        self.sum += i64::from(answer.as_i8());
        self.answered += 1;
        self.queries += 1;
        if self.answered == self.params.trials {
            let score = TrialScore::from_parts(self.sum, self.answered);
            self.sum = 0;
            self.answered = 0;
            self.transition(score);
        }
        Ok(())
    }

    /// Feed a complete `M`-trial score to the current probe.
    pub fn record_score(&mut self, score: TrialScore) -> Result<()> {
        if self.is_done() {
            return Err(Error::invalid("line search already finished"));
        }
        if self.answered != 0 || score.trials() != self.params.trials {
            return Err(Error::invalid("score does not match the pending probe"));
        }
        self.queries += u64::from(score.trials());
        self.transition(score);
        Ok(())
    }

    fn transition(&mut self, score: TrialScore) {
        let v = score.value();
        let omega = self.params.omega;
        let psi = self.params.psi;
        let floor = self.params.alpha_default;
        self.stage = match self.stage {
            Stage::Extend | Stage::Classify if v <= -omega => {
                if self.stage == Stage::Extend {
                    self.alpha *= psi;
                    self.moves += 1;
                }
                if self.moves >= self.params.max_expansions {
                    self.truncated = true;
                    Stage::Done
                } else {
                    Stage::Extend
                }
            }
            Stage::Classify if v >= omega && self.alpha > floor => {
                Stage::Shrink { candidate: (self.alpha / psi).max(floor) }
            }
            Stage::Shrink { candidate } => {
                self.alpha = candidate;
                self.moves += 1;
                if v >= omega && self.alpha > floor {
                    if self.moves >= self.params.max_expansions {
                        self.truncated = true;
                        Stage::Done
                    } else {
                        Stage::Shrink { candidate: (self.alpha / psi).max(floor) }
                    }
                } else {
                    Stage::Done
                }
            }
            _ => Stage::Done,
        };
        self.check_budget();
    }

    fn check_budget(&mut self) {
        if let Some(b) = self.budget {
            if !self.is_done() && self.answered == 0 && self.queries + u64::from(self.params.trials) > b {
                self.stage = Stage::Done;
                self.truncated = true;
            }
        }
    }
}

fn drive<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    x: ArrayView1<'_, f64>,
    g_hat: ArrayView1<'_, f64>,
    mut search: StepSearch,
) -> Result<SearchOutcome> {
    if x.len() != g_hat.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), actual: g_hat.len() });
    }
    while let Some(probe) = search.probe() {
        let (a, b) = probe.points(x, g_hat);
        let score = oracle.m_trial_query(a.view(), b.view(), search.trials())?;
        search.record_score(score)?;
    }
    Ok(search.outcome().expect("search finished"))
}

/// Cold-started inexact line search along `−ĝ`.
pub fn line_search<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    x: ArrayView1<'_, f64>,
    g_hat: ArrayView1<'_, f64>,
    params: SearchParams,
) -> Result<SearchOutcome> {
    drive(oracle, x, g_hat, StepSearch::cold(params)?)
}

/// Warm-started inexact line search along `−ĝ`, starting at `alpha_init`.
pub fn warm_line_search<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    x: ArrayView1<'_, f64>,
    g_hat: ArrayView1<'_, f64>,
    alpha_init: f64,
    params: SearchParams,
) -> Result<SearchOutcome> {
    drive(oracle, x, g_hat, StepSearch::warm(params, alpha_init)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::Sphere;
    use crate::objective::Objective;
    use crate::oracle::{OracleParams, PolynomialOracle};
    use ndarray::arr1;
    use proptest::prelude::*;

    fn bowl(d: usize) -> PolynomialOracle<Sphere> {
        PolynomialOracle::noiseless(Sphere::new(Array1::zeros(d)), 0)
    }

    fn params(alpha_def: f64) -> SearchParams {
        SearchParams::new(alpha_def, 1, 0.05, 2.0).unwrap()
    }

    #[test]
    fn doubling_walk_by_hand() {
        // f = ‖x‖², x = (8, 0): 49 → 36 → 16 → 0, then 64 stops the walk.
        let mut oracle = bowl(2);
        let out = line_search(&mut oracle, arr1(&[8.0, 0.0]).view(), arr1(&[1.0, 0.0]).view(), params(1.0))
            .unwrap();
        assert_eq!(out.alpha, 8.0);
        assert!(!out.truncated);
        assert_eq!(out.queries, 4);
        assert_eq!(oracle.query_count(), 4);
    }

    #[test]
    fn unreachable_confidence_returns_default() {
        let mut oracle = bowl(2);
        let p = SearchParams::new(1.0, 40, 1.5, 2.0).unwrap();
        let out = line_search(&mut oracle, arr1(&[8.0, 0.0]).view(), arr1(&[1.0, 0.0]).view(), p).unwrap();
        assert_eq!(out.alpha, 1.0);
        assert_eq!(out.queries, 40);
    }

    #[test]
    fn unbounded_ray_hits_the_cap() {
        let mut oracle = PolynomialOracle::noiseless(crate::benchmarks::Linear::new(arr1(&[1.0])), 0);
        let out = line_search(&mut oracle, arr1(&[0.0]).view(), arr1(&[1.0]).view(), params(1.0)).unwrap();
        assert!(out.truncated);
        assert_eq!(out.alpha, 2f64.powi(60));
    }

    #[test]
    fn warm_shrink_by_hand() {
        // x = (3, 0): step 8 lands at f = 25 > 9 (bad); step 4 at f = 1 (good).
        let mut oracle = bowl(2);
        let out = warm_line_search(
            &mut oracle,
            arr1(&[3.0, 0.0]).view(),
            arr1(&[1.0, 0.0]).view(),
            8.0,
            params(1e-4),
        )
        .unwrap();
        assert_eq!(out.alpha, 4.0);
        assert_eq!(out.queries, 2);
    }

    #[test]
    fn warm_shrink_floors_at_default() {
        // x = (1, 0), ĝ = −e₁ points uphill: every step is bad.
        let mut oracle = bowl(2);
        let out = warm_line_search(
            &mut oracle,
            arr1(&[1.0, 0.0]).view(),
            arr1(&[-1.0, 0.0]).view(),
            1.0,
            params(0.1),
        )
        .unwrap();
        assert_eq!(out.alpha, 0.1);
    }

    #[test]
    fn warm_good_start_matches_cold_from_there() {
        let x = arr1(&[13.0, 0.0]);
        let g = arr1(&[1.0, 0.0]);
        let mut a = bowl(2);
        let warm = warm_line_search(&mut a, x.view(), g.view(), 3.0, params(1e-3)).unwrap();
        let mut b = bowl(2);
        let cold = line_search(&mut b, x.view(), g.view(), params(3.0)).unwrap();
        assert_eq!(warm.alpha, cold.alpha);
        assert_eq!(warm.queries, cold.queries + 1);
    }

    #[test]
    fn mediocre_confidence_keeps_initial_step() {
        // Equal values at 0 and 2 along the ray: the tie gives fair coins,
        // and ω = 0.9 is out of reach for a 40-trial average of them.
        let mut oracle = bowl(1);
        let p = SearchParams::new(1e-3, 40, 0.9, 2.0).unwrap();
        let out = warm_line_search(&mut oracle, arr1(&[1.0]).view(), arr1(&[1.0]).view(), 2.0, p).unwrap();
        assert_eq!(out.alpha, 2.0);
        assert_eq!(out.queries, 40);
    }

    #[test]
    fn warm_start_below_default_rejected() {
        assert!(StepSearch::warm(params(1.0), 0.5).is_err());
    }

    #[test]
    fn budget_truncates_before_a_probe() {
        let s = StepSearch::cold(SearchParams::new(1.0, 40, 0.05, 2.0).unwrap()).unwrap().with_budget(39);
        assert!(s.is_done());
        assert_eq!(s.outcome().unwrap().alpha, 1.0);
        assert!(s.outcome().unwrap().truncated);
    }

    #[test]
    fn answers_one_at_a_time_match_scores() {
        let p = SearchParams::new(1.0, 5, 0.05, 2.0).unwrap();
        let mut s = StepSearch::cold(p).unwrap();
        for _ in 0..5 {
            s.record(Sign::Minus).unwrap();
        }
        assert_eq!(s.current_alpha(), 2.0);
        for a in [Sign::Plus, Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus] {
            s.record(a).unwrap();
        }
        assert_eq!(s.outcome().unwrap().alpha, 2.0);
        assert!(s.record(Sign::Plus).is_err());
    }

    #[test]
    fn noisy_oracle_still_terminates() {
        let mut oracle = PolynomialOracle::new(
            Sphere::new(Array1::zeros(3)),
            OracleParams::new(0.3, 1.0, 1.0).unwrap(),
            12,
        );
        let p = SearchParams::new(0.5, 40, 0.05, 2.0).unwrap();
        let out = line_search(&mut oracle, arr1(&[10.0, 0.0, 0.0]).view(), arr1(&[1.0, 0.0, 0.0]).view(), p)
            .unwrap();
        assert!(out.alpha >= 0.5 && out.alpha <= 16.0, "{}", out.alpha);
        assert_eq!(out.queries % 40, 0);
    }

    proptest! {
        // On a quadratic ray φ(α) = (α − α⋆)², the doubling walk stops at the
        // first α with φ(α) ≤ φ(ψα), so 2α⋆/(1+ψ) ≤ α < 2ψα⋆/(1+ψ).
        #[test]
        fn quadratic_ray_bracket(star in 1.0f64..1000.0, psi in 1.2f64..4.0) {
            let mut oracle = bowl(1);
            let p = SearchParams::new(1.0, 1, 0.05, psi).unwrap();
            let out = line_search(&mut oracle, arr1(&[star]).view(), arr1(&[1.0]).view(), p).unwrap();
            let f = Sphere::new(Array1::zeros(1));
            let phi = |a: f64| f.value(arr1(&[star - a]).view());
            prop_assume!(phi(out.alpha) != phi(psi * out.alpha));
            prop_assert!(out.alpha >= 2.0 * star / (1.0 + psi) - 1e-9);
            prop_assert!(out.alpha < 2.0 * psi * star / (1.0 + psi) + 1e-9);
        }
    }
}
