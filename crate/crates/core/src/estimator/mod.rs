//! One-bit gradient estimation from comparison queries.
//!
//! Each query `C_f(x, x + r zᵢ)` is treated as a noisy one-bit measurement
//! `sign(zᵢᵀ∇f(x))`. The normalized gradient is then recovered by
//! maximizing `Σ yᵢ zᵢᵀg` over the set of compressible unit-ball vectors,
//! see [`solve_cap_program`].

mod cap;

pub use cap::{cap_ratio, solve_cap_program, DEFAULT_CAP_TOL};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{ComparisonOracle, Sign};

/// How measurement directions are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementVariant {
    /// `zᵢ ~ U(S^{d−1})`; the same vectors are used to query and to recover.
    #[default]
    SphereUniform,
    /// `zᵢ ~ N(0, I)`. The oracle is queried along `zᵢ/‖zᵢ‖₂`, recovery uses
    /// the raw Gaussian rows. Scaling does not change `sign(zᵢᵀg)`.
    Gaussian,
}

/// `m` measurement directions in `ℝ^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    variant: MeasurementVariant,
    /// Unit rows used to build query points.
    unit: Array2<f64>,
    /// Raw Gaussian rows, kept only for [`MeasurementVariant::Gaussian`].
    raw: Option<Array2<f64>>,
}

impl DirectionSet {
    pub fn variant(&self) -> MeasurementVariant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.unit.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.unit.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.unit.ncols()
    }

    /// Unit direction used for the `i`-th oracle query.
    pub fn query_direction(&self, i: usize) -> ArrayView1<'_, f64> {
        self.unit.row(i)
    }

    pub fn query_directions(&self) -> ArrayView2<'_, f64> {
        self.unit.view()
    }

    /// Rows entering the recovery program.
    pub fn recovery_directions(&self) -> ArrayView2<'_, f64> {
        self.raw.as_ref().unwrap_or(&self.unit).view()
    }
}

fn gaussian_rows<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Array2<f64> {
    let mut rows = Array2::zeros((m, d));
    for mut row in rows.rows_mut() {
        loop {
            row.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            if row.iter().any(|v| *v != 0.0) {
                break;
            }
        }
    }
    rows
}

fn normalized(rows: &Array2<f64>) -> Array2<f64> {
    let mut unit = rows.clone();
    for mut row in unit.rows_mut() {
        let n = row.dot(&row).sqrt();
        row /= n;
    }
    unit
}

/// `m` i.i.d. directions uniform on the unit sphere: Gaussian draw, then normalize.
pub fn sample_sphere_directions<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<DirectionSet> {
    sample_directions(d, m, MeasurementVariant::SphereUniform, rng)
}

pub fn sample_directions<R: Rng + ?Sized>(
    d: usize,
    m: usize,
    variant: MeasurementVariant,
    rng: &mut R,
) -> Result<DirectionSet> {
    if d == 0 || m == 0 {
        return Err(Error::invalid(format!("need d >= 1 and m >= 1, got d={d}, m={m}")));
    }
    let raw = gaussian_rows(d, m, rng);
    let unit = normalized(&raw);
    let raw = match variant {
        MeasurementVariant::SphereUniform => None,
        MeasurementVariant::Gaussian => Some(raw),
    };
    Ok(DirectionSet { variant, unit, raw })
}

/// Output of the one-bit estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimate {
    pub g_hat: Array1<f64>,
    /// Every signed measurement cancelled (`Σ yᵢzᵢ = 0`); `g_hat` is zero.
    pub degenerate: bool,
}

impl GradientEstimate {
    pub fn norm(&self) -> f64 {
        self.g_hat.dot(&self.g_hat).sqrt()
    }
}

/// `b = Σ yᵢ zᵢ` over the recovery rows.
///
/// Independent of the order in which answers arrived: only the pairing of
/// answer `i` with direction `i` matters.
pub fn measurement_vector(directions: &DirectionSet, answers: &[Sign]) -> Result<Array1<f64>> {
    if answers.len() != directions.len() {
        return Err(Error::invalid(format!(
            "{} answers for {} directions",
            answers.len(),
            directions.len()
        )));
    }
    let y = Array1::from_iter(answers.iter().map(|a| a.value()));
    Ok(directions.recovery_directions().t().dot(&y))
}

/// Recover `ĝ` from a full set of answers.
pub fn estimate_from_answers(directions: &DirectionSet, answers: &[Sign], s: usize) -> Result<GradientEstimate> {
    let b = measurement_vector(directions, answers)?;
    match solve_cap_program(b.view(), s, DEFAULT_CAP_TOL) {
        Ok(g_hat) => Ok(GradientEstimate { g_hat, degenerate: false }),
        Err(Error::DegenerateInput) => {
            Ok(GradientEstimate { g_hat: Array1::zeros(directions.dim()), degenerate: true })
        }
        Err(e) => Err(e),
    }
}

/// Query points `x + r zᵢ` for every direction.
pub fn query_points(x: ArrayView1<'_, f64>, r: f64, directions: &DirectionSet) -> Array2<f64> {
    let mut pts = directions.query_directions().to_owned() * r;
    pts += &x.insert_axis(Axis(0));
    pts
}

/// Estimate `∇f(x)/‖∇f(x)‖₂` with `m` comparison queries at radius `r`.
pub fn one_bit_grad_est<O, R>(
    oracle: &mut O,
    x: ArrayView1<'_, f64>,
    s: usize,
    m: usize,
    r: f64,
    variant: MeasurementVariant,
    rng: &mut R,
) -> Result<GradientEstimate>
where
    O: ComparisonOracle + ?Sized,
    R: Rng + ?Sized,
{
    let d = oracle.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: x.len() });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("sampling radius must be positive, got {r}")));
    }
    if s == 0 || s > d {
        return Err(Error::invalid(format!("sparsity {s} must lie in 1..={d}")));
    }
    let directions = sample_directions(d, m, variant, rng)?;
    let points = query_points(x, r, &directions);
    let answers = points
        .rows()
        .into_iter()
        .map(|y| oracle.query(x, y))
        .collect::<Result<Vec<_>>>()?;
    estimate_from_answers(&directions, &answers, s)
}

fn check_sparsity_dims(s: usize, d: usize) -> Result<()> {
    if s == 0 || s > d {
        return Err(Error::invalid(format!("need 1 <= s ({s}) <= d ({d})")));
    }
    Ok(())
}

/// Sample count sufficient for accuracy `η`: `⌈4C η⁻⁴ δ₀⁻² s ln(2d/s)⌉`.
pub fn theoretical_m(s: usize, d: usize, eta: f64, delta0: f64, c: f64) -> Result<usize> {
    check_sparsity_dims(s, d)?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (0, 1), got {eta}")));
    }
    if !(delta0 > 0.0 && delta0 <= 0.5) {
        return Err(Error::invalid(format!("delta0 must lie in (0, 0.5], got {delta0}")));
    }
    if !(c > 0.0) {
        return Err(Error::invalid(format!("constant C must be positive, got {c}")));
    }
    let s_f = s as f64;
    let m = 4.0 * c * eta.powi(-4) * delta0.powi(-2) * s_f * (2.0 * d as f64 / s_f).ln();
    Ok(m.ceil().max(1.0) as usize)
}

/// The benchmark rule of thumb `⌈20 s ln(2d/s)⌉`.
pub fn practical_m(s: usize, d: usize) -> Result<usize> {
    check_sparsity_dims(s, d)?;
    let s_f = s as f64;
    Ok((20.0 * s_f * (2.0 * d as f64 / s_f).ln()).ceil().max(1.0) as usize)
}
