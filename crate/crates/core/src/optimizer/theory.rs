//! Parameter choices that make the convergence guarantee apply.
//!
//! Only the `κ = 1` oracle regime has a theory; the constant `C` is not
//! known in closed form and is passed in by the caller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub lipschitz: f64,
    pub nu: f64,
    pub eta: f64,
    pub alpha: f64,
    /// `ρ* = (1 − η²) / (ν/(2L) − η)`.
    pub rho_star: f64,
    /// Iterations sufficient to reach the accuracy floor.
    pub iterations: u64,
    /// Comparisons per gradient estimate.
    pub m: usize,
    /// Sampling radius `αν ρ* / (2L√d)`.
    pub r: f64,
    /// Accuracy floor `(L/2) α² (1 + ρ*)²`.
    pub epsilon: f64,
}

impl TheoryParams {
    pub fn total_queries(&self) -> u64 {
        self.iterations.saturating_mul(self.m as u64)
    }
}

/// `ρ* = (1 − η²) / (ν/(2L) − η)`; requires `0 ≤ η < ν/(2L)`.
pub fn rho_star(lipschitz: f64, nu: f64, eta: f64) -> Result<f64> {
    if !(lipschitz > 0.0 && nu > 0.0 && nu <= lipschitz) {
        return Err(Error::invalid(format!("need 0 < nu ({nu}) <= L ({lipschitz})")));
    }
    let gap = nu / (2.0 * lipschitz) - eta;
    if !(eta >= 0.0 && gap > 0.0) {
        return Err(Error::invalid(format!("eta ({eta}) must lie in [0, nu/(2L))")));
    }
    Ok((1.0 - eta * eta) / gap)
}

/// `(L/2) α² (1 + ρ*)²`.
pub fn accuracy_floor(lipschitz: f64, alpha: f64, rho_star: f64) -> f64 {
    0.5 * lipschitz * alpha * alpha * (1.0 + rho_star).powi(2)
}

#[allow(clippy::too_many_arguments)]
pub fn theory_params(
    lipschitz: f64,
    nu: f64,
    eta: f64,
    alpha: f64,
    delta_initial: f64,
    delta0: f64,
    s: usize,
    d: usize,
    c: f64,
) -> Result<TheoryParams> {
    if !(eta > 0.0) {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    let rho = rho_star(lipschitz, nu, eta)?;
    if !(alpha > 0.0 && delta_initial > 0.0) {
        return Err(Error::invalid("alpha and the initial distance must be positive"));
    }
    if !(delta0 > 0.0 && delta0 <= 0.5) {
        return Err(Error::invalid(format!("delta0 must lie in (0, 0.5], got {delta0}")));
    }
    if s == 0 || s > d {
        return Err(Error::invalid(format!("need 1 <= s ({s}) <= d ({d})")));
    }
    if !(c > 0.0) {
        return Err(Error::invalid(format!("constant C must be positive, got {c}")));
    }
    let ratio = nu / (2.0 * lipschitz);
    let head = (delta_initial - alpha * eta).max(0.0);
    let k = head.powi(3) / ((alpha * rho).powi(2) * (alpha * ratio - alpha * eta));
    let s_f = s as f64;
    let m = c * eta.powi(-4) * delta0.powi(-2) * s_f * (2.0 * d as f64 / s_f).ln();
    Ok(TheoryParams {
        lipschitz,
        nu,
        eta,
        alpha,
        rho_star: rho,
        iterations: k.ceil() as u64,
        m: m.ceil().max(1.0) as usize,
        r: alpha * nu * rho / (2.0 * lipschitz * (d as f64).sqrt()),
        epsilon: accuracy_floor(lipschitz, alpha, rho),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_star_examples() {
        assert!((rho_star(1.0, 1.0, 0.25).unwrap() - 3.75).abs() < 1e-12);
        // η = 0 gives twice the condition number.
        assert!((rho_star(4.0, 1.0, 0.0).unwrap() - 8.0).abs() < 1e-12);
        assert!(rho_star(1.0, 1.0, 0.5).is_err());
        assert!(rho_star(1.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn iteration_count_recomputed() {
        // (10 − 0.025)³ / (0.375² · 0.025) = 282 316.44
        let t = theory_params(1.0, 1.0, 0.25, 0.1, 10.0, 0.5, 20, 500, 1.0).unwrap();
        assert_eq!(t.iterations, 282_317);
        assert!((t.rho_star - 3.75).abs() < 1e-12);
        assert!((t.epsilon - 0.5 * 0.01 * 4.75f64.powi(2)).abs() < 1e-12);
        assert!((t.r - 0.1 * 3.75 / (2.0 * 500f64.sqrt())).abs() < 1e-15);
        // C η⁻⁴ δ₀⁻² s ln(2d/s) = 256 · 4 · 20 · ln 50
        assert_eq!(t.m, (256.0 * 4.0 * 20.0 * 50f64.ln()).ceil() as usize);
        assert_eq!(t.total_queries(), 282_317 * t.m as u64);
    }

    #[test]
    fn eta_at_the_limit_is_rejected() {
        assert!(theory_params(2.0, 2.0, 0.5, 0.1, 1.0, 0.3, 5, 10, 1.0).is_err());
        assert!(theory_params(2.0, 2.0, 0.0, 0.1, 1.0, 0.3, 5, 10, 1.0).is_err());
    }
}
