use serde::{Deserialize, Serialize};

use super::step::StepPolicy;
use crate::error::{Error, Result};
use crate::estimator::MeasurementVariant;

/// When a run stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Budget {
    Iterations(u64),
    /// Total oracle answers. An iteration only starts if its `m` estimation
    /// queries fit; a line search stops before a comparison that would not fit.
    Queries(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoboConfig {
    /// Target sparsity of the gradient.
    pub s: usize,
    /// Comparisons per gradient estimate.
    pub m: usize,
    /// Sampling radius.
    pub r: f64,
    pub budget: Budget,
    pub step: StepPolicy,
    pub variant: MeasurementVariant,
    /// Seeds the direction streams; one substream per iteration.
    pub seed: u64,
}

impl ScoboConfig {
    pub fn new(s: usize, m: usize, r: f64, budget: Budget, step: StepPolicy, seed: u64) -> Self {
        Self { s, m, r, budget, step, variant: MeasurementVariant::SphereUniform, seed }
    }

    pub fn with_variant(mut self, variant: MeasurementVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if self.s == 0 || self.s > dim {
            return Err(Error::invalid(format!("s must lie in 1..={dim}, got {}", self.s)));
        }
        if self.m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::invalid(format!("r must be positive, got {}", self.r)));
        }
        self.step.validate()
    }
}
