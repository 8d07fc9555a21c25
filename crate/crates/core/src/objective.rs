//! The function-access abstraction shared by simulated oracles and diagnostics.
//!
//! An optimizer never calls [`Objective::value`] directly: it only sees
//! comparison bits. The value, gradient and minimum are used by simulated
//! oracles to produce those bits, and by the trace recorder for diagnostics.

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};

pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// Unchecked evaluation; `x` must have length [`Objective::dim`].
    fn value(&self, x: ArrayView1<'_, f64>) -> f64;

    /// Analytic gradient, when the objective knows one.
    fn gradient(&self, _x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        None
    }

    /// Known global minimum value `f*`.
    fn min_value(&self) -> Option<f64> {
        None
    }

    /// Declared compressibility level `s`, meaning `‖∇f‖₁ ≤ √s‖∇f‖₂` everywhere.
    fn sparsity(&self) -> Option<usize> {
        None
    }

    fn checked_value(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value(x))
    }
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        (**self).gradient(x)
    }
    fn min_value(&self) -> Option<f64> {
        (**self).min_value()
    }
    fn sparsity(&self) -> Option<usize> {
        (**self).sparsity()
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        (**self).gradient(x)
    }
    fn min_value(&self) -> Option<f64> {
        (**self).min_value()
    }
    fn sparsity(&self) -> Option<usize> {
        (**self).sparsity()
    }
}

impl<T: Objective + ?Sized> Objective for std::sync::Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        (**self).gradient(x)
    }
    fn min_value(&self) -> Option<f64> {
        (**self).min_value()
    }
    fn sparsity(&self) -> Option<usize> {
        (**self).sparsity()
    }
}
