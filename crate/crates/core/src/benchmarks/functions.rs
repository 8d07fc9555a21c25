//! Synthetic objectives with known minima and sparse gradients.

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;

/// Skewed quartic on a leading block of coordinates, constant elsewhere.
///
/// With `u` the first `active` coordinates and `w = Bu`, where `B` is the
/// upper-triangular all-ones matrix scaled by `1/active`:
///
/// ```text
/// f(x) = Σ wᵢ² + 0.1 Σ wᵢ³ + 0.01 Σ wᵢ⁴
/// ```
///
/// Each term is `t²(1 + 0.1t + 0.01t²) ≥ 0`, so `f* = 0` at `u = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewedQuartic {
    dim: usize,
    active: usize,
}

impl SkewedQuartic {
    pub fn new(active: usize, dim: usize) -> Result<Self> {
        if active == 0 || active > dim {
            return Err(Error::invalid(format!("need 1 <= active ({active}) <= dim ({dim})")));
        }
        Ok(Self { dim, active })
    }

    pub fn active(&self) -> usize {
        self.active
    }

    /// `w = Bu`: scaled suffix sums of the active block.
    fn transformed(&self, x: ArrayView1<'_, f64>) -> Vec<f64> {
        let scale = 1.0 / self.active as f64;
        let mut w = vec![0.0; self.active];
        let mut acc = 0.0;
        for i in (0..self.active).rev() {
            acc += x[i];
            w[i] = acc * scale;
        }
        w
    }
}

impl Objective for SkewedQuartic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.transformed(x)
            .into_iter()
            .map(|t| {
                let t2 = t * t;
                t2 + 0.1 * t2 * t + 0.01 * t2 * t2
            })
            .sum()
    }

    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        let w = self.transformed(x);
        let scale = 1.0 / self.active as f64;
        let mut g = Array1::zeros(self.dim);
        // Bᵀv has prefix sums of v = ∂f/∂w.
        let mut acc = 0.0;
        for (j, t) in w.into_iter().enumerate() {
            acc += 2.0 * t + 0.3 * t * t + 0.04 * t * t * t;
            g[j] = acc * scale;
        }
        Some(g)
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn sparsity(&self) -> Option<usize> {
        Some(self.active)
    }
}

/// Sum of the `count` largest squared entries.
///
/// Ties in magnitude go to the lowest index, which only matters for the
/// gradient's support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopSquares {
    dim: usize,
    count: usize,
}

impl TopSquares {
    pub fn new(count: usize, dim: usize) -> Result<Self> {
        if count == 0 || count > dim {
            return Err(Error::invalid(format!("need 1 <= count ({count}) <= dim ({dim})")));
        }
        Ok(Self { dim, count })
    }

    /// Indices of the `count` largest-magnitude entries, lowest index first on ties.
    pub fn support(&self, x: ArrayView1<'_, f64>) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..x.len()).collect();
        let by_magnitude = |&a: &usize, &b: &usize| {
            x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b))
        };
        if self.count < idx.len() {
            idx.select_nth_unstable_by(self.count - 1, by_magnitude);
            idx.truncate(self.count);
        }
        idx.sort_unstable();
        idx
    }
}

impl Objective for TopSquares {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        let mut sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        if self.count < sq.len() {
            sq.select_nth_unstable_by(self.count - 1, |a, b| b.total_cmp(a));
            sq.truncate(self.count);
        }
        sq.into_iter().sum()
    }

    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        let mut g = Array1::zeros(self.dim);
        for i in self.support(x) {
            g[i] = 2.0 * x[i];
        }
        Some(g)
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn sparsity(&self) -> Option<usize> {
        Some(self.count)
    }
}

/// `f(x) = ⟨g, x⟩`. Unbounded below, so no `f*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    direction: Array1<f64>,
}

impl Linear {
    pub fn new(direction: Array1<f64>) -> Self {
        Self { direction }
    }

    pub fn direction(&self) -> &Array1<f64> {
        &self.direction
    }
}

impl Objective for Linear {
    fn dim(&self) -> usize {
        self.direction.len()
    }

    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.direction.dot(&x)
    }

    fn gradient(&self, _x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        Some(self.direction.clone())
    }

    fn sparsity(&self) -> Option<usize> {
        Some(self.direction.iter().filter(|v| **v != 0.0).count().max(1))
    }
}

/// `f(x) = Σᵢ λᵢ xᵢ²` over a few coordinates.
///
/// The minimizers are the subspace where the weighted coordinates vanish,
/// so `L = 2 max λ` and the restricted strong convexity constant is `ν = 2 min λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseQuadratic {
    dim: usize,
    weights: Vec<(usize, f64)>,
}

impl SparseQuadratic {
    pub fn new(dim: usize, weights: Vec<(usize, f64)>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("sparse quadratic needs at least one weight"));
        }
        for &(i, w) in &weights {
            if i >= dim || !(w > 0.0) {
                return Err(Error::invalid(format!("bad weight ({i}, {w}) for dim {dim}")));
            }
        }
        Ok(Self { dim, weights })
    }

    /// `Σ_{i<active} xᵢ²`, so `L = ν = 2`.
    pub fn isotropic(dim: usize, active: usize) -> Result<Self> {
        Self::new(dim, (0..active).map(|i| (i, 1.0)).collect())
    }

    pub fn lipschitz(&self) -> f64 {
        2.0 * self.weights.iter().map(|w| w.1).fold(f64::MIN, f64::max)
    }

    pub fn restricted_convexity(&self) -> f64 {
        2.0 * self.weights.iter().map(|w| w.1).fold(f64::MAX, f64::min)
    }
}

impl Objective for SparseQuadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.weights.iter().map(|&(i, w)| w * x[i] * x[i]).sum()
    }

    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        let mut g = Array1::zeros(self.dim);
        for &(i, w) in &self.weights {
            g[i] += 2.0 * w * x[i];
        }
        Some(g)
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn sparsity(&self) -> Option<usize> {
        Some(self.weights.len())
    }
}

/// `f(x) = ‖x − c‖₂²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    center: Array1<f64>,
}

impl Sphere {
    pub fn new(center: Array1<f64>) -> Self {
        Self { center }
    }

    pub fn center(&self) -> &Array1<f64> {
        &self.center
    }
}

impl Objective for Sphere {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum()
    }

    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        Some((&x - &self.center) * 2.0)
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn sparsity(&self) -> Option<usize> {
        Some(self.center.len())
    }
}
