//! Comparison oracles.
//!
//! A comparison oracle answers "is `f(y)` larger than `f(x)`?" with a single
//! bit that may be flipped. The simulated [`PolynomialOracle`] flips with the
//! polynomial noise model: the answer is correct with probability
//!
//! ```text
//! p = 1/2 + min(δ₀, μ·|f(y) − f(x)|^(κ−1))
//! ```
//!
//! The bound is implemented as an equality, so a simulated oracle is the
//! worst case allowed by its parameters.

use ndarray::ArrayView1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{check_dim, Objective};

/// One comparison bit: `Plus` means `f(y) > f(x)`, `Minus` means `y` is better.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Sign::Minus),
            1 => Some(Sign::Plus),
            _ => None,
        }
    }

    /// Sign of a nonzero real; `None` for zero and NaN.
    pub fn of(v: f64) -> Option<Self> {
        if v > 0.0 {
            Some(Sign::Plus)
        } else if v < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

/// Noise parameters `(δ₀, μ, κ)` of a polynomial comparison oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub delta0: f64,
    pub mu: f64,
    pub kappa: f64,
}

impl OracleParams {
    pub fn new(delta0: f64, mu: f64, kappa: f64) -> Result<Self> {
        if !(delta0 > 0.0 && delta0 <= 0.5) {
            return Err(Error::invalid(format!("delta0 must be in (0, 0.5], got {delta0}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid(format!("mu must be positive, got {mu}")));
        }
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!("kappa must be >= 1, got {kappa}")));
        }
        Ok(Self { delta0, mu, kappa })
    }

    /// An oracle that is always right (`p = 1` for every distinct pair).
    pub fn noiseless() -> Self {
        Self { delta0: 0.5, mu: 0.5, kappa: 1.0 }
    }

    /// `κ = 1` and `δ₀ < μ ≤ 1/2`: the regime covered by the convergence theory.
    pub fn is_theory_regime(&self) -> bool {
        self.kappa == 1.0 && self.delta0 < self.mu && self.mu <= 0.5
    }

    /// Probability that the oracle reports the true sign for a value gap `gap`.
    pub fn correct_probability(&self, gap: f64) -> f64 {
        let noise_floor = self.mu * gap.abs().powf(self.kappa - 1.0);
        0.5 + self.delta0.min(noise_floor)
    }
}

/// Average of `trials` single answers on the same pair.
///
/// The raw sum is kept so that `value · trials` is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialScore {
    sum: i64,
    trials: u32,
}

impl TrialScore {
    pub fn from_answers(answers: impl IntoIterator<Item = Sign>) -> Result<Self> {
        let mut sum = 0i64;
        let mut trials = 0u32;
        for a in answers {
            sum += i64::from(a.as_i8());
            trials += 1;
        }
        if trials == 0 {
            return Err(Error::invalid("an M-trial score needs at least one answer"));
        }
        Ok(Self { sum, trials })
    }

    pub(crate) fn from_parts(sum: i64, trials: u32) -> Self {
        debug_assert!(trials > 0 && sum.unsigned_abs() <= u64::from(trials));
        Self { sum, trials }
    }

    pub fn value(&self) -> f64 {
        self.sum as f64 / f64::from(self.trials)
    }

    pub fn sum(&self) -> i64 {
        self.sum
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }
}

/// Anything that can answer comparison queries.
///
/// Implementations count every single query. An answer that arrives
/// asynchronously (a human or remote answerer) is served through
/// [`crate::optimizer::ScoboMachine`] instead, which never blocks on this trait.
pub trait ComparisonOracle {
    fn dim(&self) -> usize;

    /// `sign(f(y) − f(x))`, possibly flipped.
    fn query(&mut self, x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> Result<Sign>;

    fn query_count(&self) -> u64;

    /// Mean of `trials` independent answers on the pair `(x, y)`.
    fn m_trial_query(
        &mut self,
        x: ArrayView1<'_, f64>,
        y: ArrayView1<'_, f64>,
        trials: u32,
    ) -> Result<TrialScore> {
        if trials == 0 {
            return Err(Error::invalid("M-trial query needs M >= 1"));
        }
        let mut sum = 0i64;
        for _ in 0..trials {
            sum += i64::from(self.query(x, y)?.as_i8());
        }
        Ok(TrialScore::from_parts(sum, trials))
    }
}

impl<T: ComparisonOracle + ?Sized> ComparisonOracle for &mut T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn query(&mut self, x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> Result<Sign> {
        (**self).query(x, y)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// Simulated oracle with polynomial noise over a known objective.
///
/// The objective stays private: callers only ever see comparison bits.
#[derive(Clone, Debug)]
pub struct PolynomialOracle<O> {
    params: OracleParams,
    objective: O,
    rng: ChaCha8Rng,
    count: u64,
}

impl<O: Objective> PolynomialOracle<O> {
    pub fn new(objective: O, params: OracleParams, seed: u64) -> Self {
        Self { params, objective, rng: ChaCha8Rng::seed_from_u64(seed), count: 0 }
    }

    pub fn noiseless(objective: O, seed: u64) -> Self {
        Self::new(objective, OracleParams::noiseless(), seed)
    }

    pub fn params(&self) -> &OracleParams {
        &self.params
    }

    /// Answer from two already-evaluated function values.
    ///
    /// Consumes exactly one uniform draw per call, tie or not.
    fn answer_for_values(&mut self, fx: f64, fy: f64) -> Sign {
        let u: f64 = self.rng.random();
        self.count += 1;
        match Sign::of(fy - fx) {
            None => {
                if u < 0.5 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }
            Some(truth) => {
                if u < self.params.correct_probability(fy - fx) {
                    truth
                } else {
                    truth.flipped()
                }
            }
        }
    }
}

impl<O: Objective> ComparisonOracle for PolynomialOracle<O> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn query(&mut self, x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> Result<Sign> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        let fx = self.objective.value(x);
        let fy = self.objective.value(y);
        Ok(self.answer_for_values(fx, fy))
    }

    fn query_count(&self) -> u64 {
        self.count
    }

    fn m_trial_query(
        &mut self,
        x: ArrayView1<'_, f64>,
        y: ArrayView1<'_, f64>,
        trials: u32,
    ) -> Result<TrialScore> {
        if trials == 0 {
            return Err(Error::invalid("M-trial query needs M >= 1"));
        }
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        // Same draws as `trials` calls to `query`, without re-evaluating f.
        let fx = self.objective.value(x);
        let fy = self.objective.value(y);
        let sum = (0..trials).map(|_| i64::from(self.answer_for_values(fx, fy).as_i8())).sum();
        Ok(TrialScore::from_parts(sum, trials))
    }
}

/// Smallest `M` with `M ≥ β/δ₀²`.
///
/// For `κ = 1` and `f(y) < f(x)`, the `M`-trial score then falls below `−δ₀`
/// with probability at least `1 − exp(−β/2)`.
pub fn trials_for_confidence(delta0: f64, beta: f64) -> Result<u32> {
    if !(delta0 > 0.0 && delta0 <= 0.5) {
        return Err(Error::invalid(format!("delta0 must be in (0, 0.5], got {delta0}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    let m = (beta / (delta0 * delta0)).ceil();
    if m > f64::from(u32::MAX) {
        return Err(Error::invalid("trial count overflows u32"));
    }
    Ok((m as u32).max(1))
}
