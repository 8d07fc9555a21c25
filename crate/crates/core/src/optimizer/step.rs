use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cap on consecutive expansions (or reductions) inside one line search.
pub const DEFAULT_MAX_EXPANSIONS: u32 = 60;

/// Parameters shared by the cold and warm-started line searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Default (and, for the warm start, minimum) step size.
    pub alpha_default: f64,
    /// Answers averaged per comparison (`M`).
    pub trials: u32,
    /// Confidence threshold on the averaged score.
    pub omega: f64,
    /// Expansion factor, `> 1`.
    pub psi: f64,
    pub max_expansions: u32,
}

impl SearchParams {
    pub fn new(alpha_default: f64, trials: u32, omega: f64, psi: f64) -> Result<Self> {
        let p = Self { alpha_default, trials, omega, psi, max_expansions: DEFAULT_MAX_EXPANSIONS };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_default > 0.0 && self.alpha_default.is_finite()) {
            return Err(Error::invalid(format!("alpha_def must be positive, got {}", self.alpha_default)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("line search needs M >= 1"));
        }
        if !(self.omega >= 0.0) {
            return Err(Error::invalid(format!("omega must be >= 0, got {}", self.omega)));
        }
        if !(self.psi > 1.0 && self.psi.is_finite()) {
            return Err(Error::invalid(format!("psi must be > 1, got {}", self.psi)));
        }
        if self.max_expansions == 0 {
            return Err(Error::invalid("max_expansions must be >= 1"));
        }
        Ok(())
    }
}

/// How each iteration picks its step size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StepPolicy {
    Fixed { alpha: f64 },
    /// `αₖ = α₀ γᵏ`.
    ExpDecay { alpha0: f64, gamma: f64 },
    /// Cold line search from `alpha_default` every iteration.
    LineSearch(SearchParams),
    /// Line search started from the previous iteration's step.
    WarmStartLineSearch(SearchParams),
}

impl StepPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepPolicy::Fixed { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::invalid(format!("fixed step must be positive, got {alpha}")))
            }
            StepPolicy::ExpDecay { alpha0, gamma } => {
                if !(alpha0 > 0.0 && alpha0.is_finite()) {
                    Err(Error::invalid(format!("alpha0 must be positive, got {alpha0}")))
                } else if !(gamma > 0.0 && gamma <= 1.0) {
                    Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")))
                } else {
                    Ok(())
                }
            }
            StepPolicy::LineSearch(p) | StepPolicy::WarmStartLineSearch(p) => p.validate(),
            StepPolicy::Fixed { .. } => Ok(()),
        }
    }

    /// Step for iteration `k` when it does not need oracle queries.
    pub fn scheduled(&self, k: u64) -> Option<f64> {
        match *self {
            StepPolicy::Fixed { alpha } => Some(alpha),
            StepPolicy::ExpDecay { alpha0, gamma } => Some(alpha0 * gamma.powf(k as f64)),
            _ => None,
        }
    }
}
