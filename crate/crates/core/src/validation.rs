//! Property checks behind `scobo validate` and the acceptance suite.
//!
//! Each check is self-contained and seeded, so a given scale always produces
//! the same verdict. Tolerances are fixed here; [`Scale::Quick`] shrinks the
//! Monte Carlo sizes tenfold and loosens the statistical tolerances to match.

use std::fmt;
use std::time::{Duration, Instant};

use ndarray::{arr1, Array1, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::benchmarks::{make_case, CaseId, Linear, SparseQuadratic, Sphere, StepVariant};
use crate::error::Result;
use crate::estimator::{one_bit_grad_est, practical_m, sample_sphere_directions, solve_cap_program, MeasurementVariant, DEFAULT_CAP_TOL};
use crate::optimizer::{accuracy_floor, line_search, rho_star, scobo_run, Budget, RunTrace, ScoboConfig, SearchParams, StepPolicy};
use crate::oracle::{ComparisonOracle, OracleParams, PolynomialOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Full,
    /// Tenfold smaller samples with looser tolerances.
    Quick,
}

impl Scale {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn timed(id: u8, name: &'static str, limit: Duration, body: impl FnOnce() -> Result<Verdict>) -> CheckResult {
    let start = Instant::now();
    let verdict = body();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match verdict {
        Ok(v) => (v.passed, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > limit {
        passed = false;
        detail.push_str(&format!("; over the {}s time limit", limit.as_secs()));
    }
    CheckResult { id, name, passed, detail, elapsed }
}

/// Optimal value of `max ⟨b, g⟩` over `‖g‖₁ ≤ √s, ‖g‖₂ ≤ 1`, via its dual
/// `min_{λ ≥ 0} ‖S_λ(b)‖₂ + λ√s` solved by golden-section search.
pub fn reference_cap_value(b: ArrayView1<'_, f64>, s: usize) -> f64 {
    let root_s = (s as f64).sqrt();
    let dual = |lam: f64| {
        let shrunk: f64 = b.iter().map(|v| (v.abs() - lam).max(0.0).powi(2)).sum();
        shrunk.sqrt() + lam * root_s
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, b.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (dual(c), dual(d));
    for _ in 0..200 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = dual(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = dual(d);
        }
    }
    dual(0.0).min(dual(0.5 * (lo + hi)))
}

fn random_cap_instance(rng: &mut ChaCha8Rng) -> (Array1<f64>, usize) {
    let d = rng.random_range(1..=8);
    let s = rng.random_range(1..=d);
    let mut b = Array1::from_shape_fn(d, |_| rng.sample::<f64, _>(StandardNormal));
    if d > 1 && rng.random_bool(0.25) {
        let (i, j) = (rng.random_range(0..d), rng.random_range(0..d));
        b[j] = if rng.random_bool(0.5) { b[i] } else { -b[i] };
    }
    if d > 1 && rng.random_bool(0.2) {
        b[rng.random_range(0..d)] = 0.0;
    }
    if b.iter().all(|v| *v == 0.0) {
        b[0] = 1.0;
    }
    (b, s)
}

/// Feasible point from an arbitrary vector, by scaling onto both constraints.
fn feasible(mut g: Array1<f64>, s: usize) -> Array1<f64> {
    let l1 = g.iter().map(|v| v.abs()).sum::<f64>() / (s as f64).sqrt();
    let l2 = g.dot(&g).sqrt();
    let scale = l1.max(l2);
    if scale > 0.0 {
        g /= scale;
    }
    g
}

/// A cap-program solver under test: `(b, s) ↦ ĝ`.
pub type CapSolver<'a> = &'a (dyn Fn(ArrayView1<'_, f64>, usize) -> Result<Array1<f64>> + Sync);

/// 1. The cap-program solver matches the dual optimum and stays feasible.
pub fn check_solver_equivalence(scale: Scale) -> CheckResult {
    check_solver_against_reference(scale, &|b, s| solve_cap_program(b, s, DEFAULT_CAP_TOL))
}

/// Check 1 for an arbitrary solver, so broken solvers can be shown to fail.
pub fn check_solver_against_reference(scale: Scale, solver: CapSolver<'_>) -> CheckResult {
    const REL_TOL: f64 = 1e-6;
    const FEAS_TOL: f64 = 1e-9;
    let instances = scale.pick(200, 20);
    timed(1, "solver oracle equivalence", Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
        let mut worst_rel = 0.0f64;
        let mut worst_feas = 0.0f64;
        let mut beaten = 0usize;
        for _ in 0..instances {
            let (b, s) = random_cap_instance(&mut rng);
            let g = solver(b.view(), s)?;
            let value = b.dot(&g);
            let reference = reference_cap_value(b.view(), s);
            worst_rel = worst_rel.max((value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE));
            let l1 = g.iter().map(|v| v.abs()).sum::<f64>();
            let l2 = g.dot(&g).sqrt();
            worst_feas = worst_feas.max(l1 - (s as f64).sqrt()).max(l2 - 1.0);
            for k in 0..500 {
                let mut z = Array1::from_shape_fn(b.len(), |_| rng.sample::<f64, _>(StandardNormal));
                if k % 2 == 0 {
                    // Bias half the probes toward b, where the optimum lives.
                    z = &b + &(z * 0.3);
                }
                if b.dot(&feasible(z, s)) > value + 1e-9 {
                    beaten += 1;
                }
            }
        }
        Ok(Verdict {
            passed: worst_rel <= REL_TOL && worst_feas <= FEAS_TOL && beaten == 0,
            detail: format!(
                "{instances} instances, max rel gap {worst_rel:.2e} (tol {REL_TOL:e}), max violation {:.2e} (tol {FEAS_TOL:e}), random feasible points beating solver: {beaten}",
                worst_feas.max(0.0)
            ),
        })
    })
}

/// 2. Coordinate statistics of uniform sphere samples at `d = 10`.
pub fn check_sphere_statistics(scale: Scale) -> CheckResult {
    let n = scale.pick(100_000, 10_000);
    let (mean_tol, second_tol) = scale.pick((0.01, 0.002), (0.03, 0.006));
    const FREQ_MIN: f64 = 0.49;
    timed(2, "sphere statistics", Duration::from_secs(5), || {
        let d = 10;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
        let dirs = sample_sphere_directions(d, n, &mut rng)?;
        let col = dirs.query_directions().column(0).to_owned();
        let nf = n as f64;
        let mean = col.sum() / nf;
        let second = col.dot(&col) / nf;
        let threshold = 1.0 / (d as f64).sqrt();
        let freq = col.iter().filter(|v| v.abs() >= threshold).count() as f64 / nf;
        let ok_mean = mean.abs() < mean_tol;
        let ok_second = (second - 0.1).abs() < second_tol;
        let ok_freq = freq >= FREQ_MIN;
        Ok(Verdict {
            passed: ok_mean && ok_second && ok_freq,
            detail: format!(
                "n={n}: mean(z1)={mean:.4} [{}], mean(z1^2)={second:.5} [{}], freq(|z1|>=1/sqrt10)={freq:.4} vs >= {FREQ_MIN} [{}]",
                ok(ok_mean),
                ok(ok_second),
                ok(ok_freq)
            ),
        })
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fails"
    }
}

/// 3. Empirical correct-answer rates match the oracle model for every case.
pub fn check_oracle_calibration(scale: Scale) -> CheckResult {
    let n = scale.pick(10_000, 1_000);
    let tol = scale.pick(0.02, 0.06);
    const GAPS: [f64; 4] = [1e-4, 1e-2, 0.25, 1.0];
    timed(3, "oracle calibration", Duration::from_secs(5), || {
        let mut worst = 0.0f64;
        let mut cd_rates = Vec::new();
        for (ci, id) in CaseId::ALL.into_iter().enumerate() {
            let params = make_case(id).oracle;
            for (gi, gap) in GAPS.into_iter().enumerate() {
                let mut oracle = PolynomialOracle::new(Linear::new(arr1(&[gap])), params, (ci * 10 + gi) as u64);
                let (x, up, down) = (arr1(&[0.0]), arr1(&[1.0]), arr1(&[-1.0]));
                let mut correct = 0usize;
                for q in 0..n {
                    let (y, truth) = if q % 2 == 0 { (&up, 1) } else { (&down, -1) };
                    if oracle.query(x.view(), y.view())?.as_i8() == truth {
                        correct += 1;
                    }
                }
                let rate = correct as f64 / n as f64;
                worst = worst.max((rate - params.correct_probability(gap)).abs());
                if matches!(id, CaseId::C | CaseId::D) {
                    cd_rates.push(rate);
                }
            }
        }
        let cd_worst = cd_rates.iter().fold(0.0f64, |m, r| m.max((r - 0.8).abs()));
        Ok(Verdict {
            passed: worst <= tol && cd_worst <= tol,
            detail: format!(
                "{n} queries per (case, gap): max deviation from model {worst:.4}, cases c/d max |rate-0.80| {cd_worst:.4} (tol {tol})"
            ),
        })
    })
}

fn estimator_errors(trials: usize, m: usize, seed: u64) -> Result<Vec<f64>> {
    let (s, d) = (20, 500);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + t as u64);
            let mut g = Array1::zeros(d);
            for i in rand::seq::index::sample(&mut rng, d, s) {
                g[i] = rng.sample::<f64, _>(StandardNormal);
            }
            let unit = &g / g.dot(&g).sqrt();
            let mut oracle = PolynomialOracle::noiseless(Linear::new(g), seed ^ t as u64);
            let x = Array1::zeros(d);
            let est = one_bit_grad_est(&mut oracle, x.view(), s, m, 1.0, MeasurementVariant::SphereUniform, &mut rng)?;
            let diff = &est.g_hat - &unit;
            Ok(diff.dot(&diff).sqrt())
        })
        .collect()
}

fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// 4. Noiseless recovery of a 20-sparse linear gradient in 500 dimensions.
pub fn check_estimator_accuracy(scale: Scale) -> CheckResult {
    const MAX_ERR: f64 = 0.5;
    const MIN_SHARE: f64 = 0.95;
    let trials = scale.pick(50, 10);
    timed(4, "estimator accuracy", Duration::from_secs(120), || {
        let m = practical_m(20, 500)?;
        let base = estimator_errors(trials, m, 4_000)?;
        let more = estimator_errors(trials, 4 * m, 4_000)?;
        let share = base.iter().filter(|e| **e <= MAX_ERR).count() as f64 / trials as f64;
        let (med, med4) = (median(&base), median(&more));
        Ok(Verdict {
            passed: share >= MIN_SHARE && med4 < med,
            detail: format!(
                "{trials} trials, m={m}: share with error <= {MAX_ERR} is {share:.2} (need {MIN_SHARE}); median error {med:.4} -> {med4:.4} at m={}",
                4 * m
            ),
        })
    })
}

/// Query budget of the case (c) runs behind checks 5, 6 and 8.
pub const CASE_C_BUDGET: u64 = 100_000;

/// 5. Time-averaged flipped fraction on case (c) sits at the oracle's 20%.
pub fn check_flipped_fraction(scale: Scale) -> CheckResult {
    const TARGET: f64 = 0.20;
    const TOL: f64 = 0.03;
    let budget = scale.pick(CASE_C_BUDGET, CASE_C_BUDGET / 10);
    timed(5, "flipped-measurement fraction", Duration::from_secs(300), || {
        let trace = make_case(CaseId::C).run(StepVariant::Fs, Budget::Queries(budget), 0)?;
        let frac = trace.mean_flipped_fraction().unwrap_or(f64::NAN);
        Ok(Verdict {
            passed: (frac - TARGET).abs() <= TOL,
            detail: format!(
                "case c, fixed step, {} queries: mean flipped fraction {frac:.4} (target {TARGET} +/- {TOL})",
                trace.total_queries
            ),
        })
    })
}

/// Index of the first value within `factor` times the median of the run's
/// final half; values before it form the descent phase.
pub fn plateau_start(values: &[f64], f_star: f64, factor: f64) -> usize {
    let gaps: Vec<f64> = values.iter().map(|v| v - f_star).collect();
    if gaps.is_empty() {
        return 0;
    }
    let level = median(&gaps[gaps.len() / 2..]);
    gaps.iter().position(|g| *g <= factor * level).unwrap_or(gaps.len())
}

/// Plateau factor used by check 6.
pub const PLATEAU_FACTOR: f64 = 2.0;

/// Non-increasing steps among the pre-plateau transitions of a trace.
fn descent_phase(trace: &RunTrace) -> (usize, usize) {
    let values = trace.values();
    let end = plateau_start(&values, 0.0, PLATEAU_FACTOR);
    let steps: Vec<_> = values.windows(2).take(end).collect();
    (steps.iter().filter(|w| w[1] <= w[0]).count(), steps.len())
}

/// Sparse-quadratic instance of check 6: `(objective, config, x0, ε)`.
pub fn descent_quadratic(seed: u64) -> Result<(SparseQuadratic, ScoboConfig, Array1<f64>, f64)> {
    let (d, active) = (50, 5);
    let f = SparseQuadratic::isotropic(d, active)?;
    let (lip, nu, eta, alpha) = (f.lipschitz(), f.restricted_convexity(), 0.25, 0.05);
    let eps = accuracy_floor(lip, alpha, rho_star(lip, nu, eta)?);
    let m = practical_m(active, d)?;
    let config = ScoboConfig::new(active, m, 1e-4, Budget::Iterations(120), StepPolicy::Fixed { alpha }, seed);
    let x0 = Array1::from_shape_fn(d, |i| if i < active { 1.0 } else { 0.0 });
    Ok((f, config, x0, eps))
}

/// 6. Fixed-step SCOBO descends until it reaches its accuracy floor.
pub fn check_guaranteed_descent(scale: Scale) -> CheckResult {
    const MIN_SHARE: f64 = 0.95;
    let case_seeds = scale.pick(5u64, 2);
    let quad_seeds = scale.pick(10u64, 3);
    timed(6, "guaranteed descent", Duration::from_secs(600), || {
        let spec = make_case(CaseId::C);
        let traces = (0..case_seeds)
            .into_par_iter()
            .map(|seed| spec.run(StepVariant::Fs, Budget::Queries(CASE_C_BUDGET), seed))
            .collect::<Result<Vec<_>>>()?;
        let (mut good, mut total) = (0usize, 0usize);
        for t in &traces {
            let (g, n) = descent_phase(t);
            good += g;
            total += n;
        }
        let share = if total == 0 { 0.0 } else { good as f64 / total as f64 };

        let quad = (0..quad_seeds)
            .into_par_iter()
            .map(|seed| {
                let (f, config, x0, eps) = descent_quadratic(seed)?;
                let oracle_params = OracleParams::new(0.3, 1.0, 1.0)?;
                let mut oracle = PolynomialOracle::new(f.clone(), oracle_params, crate::benchmarks::oracle_seed(seed));
                let trace = scobo_run(&mut oracle, &config, x0, Some(&f))?;
                let values = trace.values();
                let bad = values.windows(2).filter(|w| w[1] > w[0] && w[0] > eps).count();
                Ok((bad, *values.last().unwrap_or(&f64::NAN), eps))
            })
            .collect::<Result<Vec<_>>>()?;
        let violations: usize = quad.iter().map(|q| q.0).sum();
        let eps = quad.first().map_or(f64::NAN, |q| q.2);
        let worst_final = quad.iter().fold(0.0f64, |m, q| m.max(q.1));
        Ok(Verdict {
            passed: total > 0 && share >= MIN_SHARE && violations == 0,
            detail: format!(
                "case c: {good}/{total} pre-plateau steps non-increasing ({share:.3}, need {MIN_SHARE}) over {case_seeds} seeds; \
                 d=50 quadratic: {violations} increases above eps={eps:.4} over {quad_seeds} seeds (worst final gap {worst_final:.4})"
            ),
        })
    })
}

/// One randomized line-search instance: `(α⋆, ψ, returned α)`.
pub fn line_search_instance(seed: u64) -> Result<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha_def = 10f64.powf(rng.random_range(-3.0..0.0));
    let alpha_star = alpha_def * 2f64.powf(rng.random_range(0.0..8.0));
    let psi = rng.random_range(1.2..4.0);
    // f(x − α·1) = (α − α⋆)² from x = 0 along ĝ = 1.
    let mut oracle = PolynomialOracle::noiseless(Sphere::new(arr1(&[-alpha_star])), seed);
    let params = SearchParams::new(alpha_def, 1, 0.05, psi)?;
    let out = line_search(&mut oracle, arr1(&[0.0]).view(), arr1(&[1.0]).view(), params)?;
    Ok((alpha_star, psi, out.alpha))
}

/// 7. Noiseless cold line search lands in `(α⋆/ψ, α⋆]` on 1-D quadratics.
pub fn check_line_search_bracket(_scale: Scale) -> CheckResult {
    const INSTANCES: u64 = 100;
    timed(7, "line-search bracket", Duration::from_secs(5), || {
        let mut inside = 0;
        let mut example = None;
        for seed in 0..INSTANCES {
            let (star, psi, alpha) = line_search_instance(seed)?;
            if alpha > star / psi && alpha <= star {
                inside += 1;
            } else if example.is_none() {
                example = Some(format!("e.g. alpha*={star:.4}, psi={psi:.3} returned {alpha:.4}"));
            }
        }
        Ok(Verdict {
            passed: inside == INSTANCES,
            detail: format!(
                "{inside}/{INSTANCES} outputs in (alpha*/psi, alpha*]{}",
                example.map(|e| format!("; {e}")).unwrap_or_default()
            ),
        })
    })
}

/// Gap threshold for the queries-to-reach comparison of check 8.
pub const ACCELERATION_GAP: f64 = 2.0;

/// 8. Line searches reach a fixed gap sooner, and the warm start ends lower.
pub fn check_step_size_ordering(scale: Scale) -> CheckResult {
    const MIN_SHARE: f64 = 0.8;
    let seeds = scale.pick(5u64, 2);
    timed(8, "acceleration and accuracy ordering", Duration::from_secs(900), || {
        let spec = make_case(CaseId::C);
        let jobs: Vec<(u64, StepVariant)> =
            (0..seeds).flat_map(|s| StepVariant::ALL.into_iter().map(move |v| (s, v))).collect();
        let traces = jobs
            .par_iter()
            .map(|&(seed, v)| spec.run(v, Budget::Queries(CASE_C_BUDGET), seed))
            .collect::<Result<Vec<_>>>()?;
        let (mut faster, mut finer) = (0u64, 0u64);
        for seed in 0..seeds as usize {
            let [fs, ls, wsls] = [&traces[3 * seed], &traces[3 * seed + 1], &traces[3 * seed + 2]];
            let reach = |t: &RunTrace| t.queries_to_reach(ACCELERATION_GAP).unwrap_or(u64::MAX);
            if reach(ls) < reach(fs) {
                faster += 1;
            }
            if let (Some(w), Some(l)) = (wsls.final_gap(), ls.final_gap()) {
                if w < l {
                    finer += 1;
                }
            }
        }
        let need = (MIN_SHARE * seeds as f64).ceil() as u64;
        Ok(Verdict {
            passed: faster >= need && finer >= need,
            detail: format!(
                "case c, {CASE_C_BUDGET} queries: LS reaches gap {ACCELERATION_GAP} before FS in {faster}/{seeds} seeds, \
                 WSLS final gap below LS in {finer}/{seeds} (need {need})"
            ),
        })
    })
}

/// 9. Identical configuration and seeds give byte-identical trace CSVs.
pub fn check_determinism(_scale: Scale) -> CheckResult {
    timed(9, "determinism", Duration::from_secs(60), || {
        let spec = make_case(CaseId::C);
        let mut identical = 0;
        for v in StepVariant::ALL {
            let a = spec.run(v, Budget::Queries(20_000), 7)?.to_csv_string();
            let b = spec.run(v, Budget::Queries(20_000), 7)?.to_csv_string();
            if a == b {
                identical += 1;
            }
        }
        Ok(Verdict {
            passed: identical == StepVariant::ALL.len(),
            detail: format!("{identical}/{} variants reproduced byte for byte", StepVariant::ALL.len()),
        })
    })
}

pub fn run_all(scale: Scale) -> Vec<CheckResult> {
    vec![
        check_solver_equivalence(scale),
        check_sphere_statistics(scale),
        check_oracle_calibration(scale),
        check_estimator_accuracy(scale),
        check_flipped_fraction(scale),
        check_guaranteed_descent(scale),
        check_line_search_bracket(scale),
        check_step_size_ordering(scale),
        check_determinism(scale),
    ]
}
