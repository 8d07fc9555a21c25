//! Maximizing a linear functional over `{g : ‖g‖₁ ≤ √s, ‖g‖₂ ≤ 1}`.
//!
//! The maximizer of `⟨b, g⟩` over this body is either `b/‖b‖₂` (when that
//! point already satisfies the ℓ1 constraint) or the normalized
//! soft-threshold `S_τ(b)/‖S_τ(b)‖₂` with `τ` chosen to make the ℓ1 constraint
//! tight. The ℓ1/ℓ2 ratio of `S_τ(b)` is non-increasing in `τ`, so `τ` is
//! found by locating the bracketing pair of sorted magnitudes and bisecting
//! inside it.

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};

/// Default tolerance on the ℓ1 constraint of the normalized solution.
pub const DEFAULT_CAP_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 200;

/// ℓ1/ℓ2 ratio of the soft-thresholded vector `S_τ(b)`.
///
/// Returns `None` once every entry is thresholded away.
pub fn cap_ratio(b: ArrayView1<'_, f64>, tau: f64) -> Option<f64> {
    let (l1, l2sq) = b.iter().fold((0.0, 0.0), |(l1, l2), v| {
        let t = (v.abs() - tau).max(0.0);
        (l1 + t, l2 + t * t)
    });
    (l2sq > 0.0).then(|| l1 / l2sq.sqrt())
}

/// Ratio over magnitudes sorted in descending order; only the leading
/// entries above `tau` contribute.
fn sorted_ratio(mags: &[f64], tau: f64) -> f64 {
    let mut l1 = 0.0;
    let mut l2sq = 0.0;
    for &a in mags {
        if a <= tau {
            break;
        }
        let t = a - tau;
        l1 += t;
        l2sq += t * t;
    }
    l1 / l2sq.sqrt()
}

fn soft_threshold_normalized(b: ArrayView1<'_, f64>, tau: f64) -> Array1<f64> {
    let mut g = b.mapv(|v| v.signum() * (v.abs() - tau).max(0.0));
    let norm = g.dot(&g).sqrt();
    g /= norm;
    g
}

/// `argmax ⟨b, g⟩` subject to `‖g‖₁ ≤ √s` and `‖g‖₂ ≤ 1`.
pub fn solve_cap_program(b: ArrayView1<'_, f64>, s: usize, tol: f64) -> Result<Array1<f64>> {
    let d = b.len();
    if s == 0 || s > d {
        return Err(Error::invalid(format!("sparsity {s} must lie in 1..={d}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("measurement vector has non-finite entries"));
    }
    let l2 = b.dot(&b).sqrt();
    if l2 == 0.0 {
        return Err(Error::DegenerateInput);
    }
    let target = (s as f64).sqrt();
    let l1: f64 = b.iter().map(|v| v.abs()).sum();
    if l1 <= target * l2 {
        return Ok(b.mapv(|v| v / l2));
    }

    let mut mags: Vec<f64> = b.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|x, y| y.total_cmp(x));
    let top = mags[0];
    let ties_at_top = mags.iter().take_while(|a| **a == top).count();

    // As τ → max|bᵢ| the ratio tends to √(#ties). If that is already at or
    // above √s, the ℓ2 constraint is slack: spread √s evenly over the ties.
    if ties_at_top >= s {
        let w = target / ties_at_top as f64;
        return Ok(b.mapv(|v| if v.abs() == top { v.signum() * w } else { 0.0 }));
    }

    // Bracket: ratio(lo) > target ≥ ratio(hi) over consecutive distinct
    // breakpoints. Breakpoints sit at the sorted magnitudes below the top.
    let mut breaks: Vec<f64> = mags.clone();
    breaks.dedup();
    breaks.push(0.0);
    breaks.dedup();
    // breaks is descending, starting at `top`. ratio(breaks[j]) is
    // non-increasing in the threshold, i.e. non-decreasing in j.
    let mut hi_idx = 0usize; // ratio at `top` is the limit √ties < target
    let mut lo_idx = breaks.len() - 1;
    while lo_idx - hi_idx > 1 {
        let mid = (lo_idx + hi_idx) / 2;
        if sorted_ratio(&mags, breaks[mid]) > target {
            lo_idx = mid;
        } else {
            hi_idx = mid;
        }
    }
    let mut lo = breaks[lo_idx];
    let mut hi = breaks[hi_idx];
    if hi_idx != 0 && target - sorted_ratio(&mags, hi) <= tol {
        return Ok(soft_threshold_normalized(b, hi));
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = sorted_ratio(&mags, mid);
        if r > target {
            lo = mid;
        } else {
            hi = mid;
            if target - r <= tol {
                break;
            }
        }
    }
    if hi >= top {
        // Bisection never left the top breakpoint: the crossing is within
        // rounding of `top`, which is the tied-maximum solution.
        let w = 1.0 / (ties_at_top as f64).sqrt();
        return Ok(b.mapv(|v| if v.abs() == top { v.signum() * w } else { 0.0 }));
    }
    Ok(soft_threshold_normalized(b, hi))
}
