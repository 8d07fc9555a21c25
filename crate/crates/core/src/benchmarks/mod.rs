//! Synthetic benchmark objectives and the four standard test cases.
//!
//! All cases have `s = 20`, `d = 500` and `m = ⌈20 s ln(2d/s)⌉ = 1565`:
//!
//! | case | objective      | κ   | μ | δ₀  | r          |
//! |------|----------------|-----|---|-----|------------|
//! | a    | skewed quartic | 1.5 | 1 | 0.5 | 1/(2√20)   |
//! | b    | top-20 squares | 1.5 | 4 | 0.5 | 1/(2√20)   |
//! | c    | skewed quartic | 1   | 1 | 0.3 | 1e-4       |
//! | d    | top-20 squares | 1   | 1 | 0.3 | 1e-4       |
//!
//! Fixed-step runs use `α = 2`. Line searches use `M = 40`, `ω = 0.05`,
//! `ψ = 2`, with `α_def = 2` (cold) or `α_def = 1e-4` (warm-started).

mod functions;

pub use functions::{Linear, SkewedQuartic, Sphere, SparseQuadratic, TopSquares};

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::practical_m;
use crate::objective::Objective;
use crate::optimizer::{scobo_run, Budget, RunTrace, ScoboConfig, SearchParams, StepPolicy};
use crate::oracle::{OracleParams, PolynomialOracle};

/// Seed of the simulated oracle for a run seeded with `seed`.
///
/// Kept apart from the direction stream so the two never share draws.
pub fn oracle_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

pub const CASE_SPARSITY: usize = 20;
pub const CASE_DIM: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseId {
    A,
    B,
    C,
    D,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::A, CaseId::B, CaseId::C, CaseId::D];
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseId::A => "a",
            CaseId::B => "b",
            CaseId::C => "c",
            CaseId::D => "d",
        })
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(CaseId::A),
            "b" => Ok(CaseId::B),
            "c" => Ok(CaseId::C),
            "d" => Ok(CaseId::D),
            other => Err(Error::invalid(format!("unknown case '{other}' (expected a, b, c or d)"))),
        }
    }
}

/// Step-size variant of a benchmark run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepVariant {
    /// Fixed step.
    Fs,
    /// Cold line search.
    Ls,
    /// Warm-started line search.
    Wsls,
}

impl StepVariant {
    pub const ALL: [StepVariant; 3] = [StepVariant::Fs, StepVariant::Ls, StepVariant::Wsls];
}

impl fmt::Display for StepVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepVariant::Fs => "fs",
            StepVariant::Ls => "ls",
            StepVariant::Wsls => "wsls",
        })
    }
}

impl FromStr for StepVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fs" => Ok(StepVariant::Fs),
            "ls" => Ok(StepVariant::Ls),
            "wsls" => Ok(StepVariant::Wsls),
            other => Err(Error::invalid(format!("unknown variant '{other}' (expected fs, ls or wsls)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BenchmarkFunction {
    SkewedQuartic(SkewedQuartic),
    TopSquares(TopSquares),
}

impl BenchmarkFunction {
    pub fn name(&self) -> &'static str {
        match self {
            BenchmarkFunction::SkewedQuartic(_) => "skewed_quartic",
            BenchmarkFunction::TopSquares(_) => "top_s_squares",
        }
    }

    pub fn by_name(name: &str, s: usize, d: usize) -> Result<Self> {
        match name {
            "skewed_quartic" => Ok(BenchmarkFunction::SkewedQuartic(SkewedQuartic::new(s, d)?)),
            "top_s_squares" => Ok(BenchmarkFunction::TopSquares(TopSquares::new(s, d)?)),
            other => Err(Error::invalid(format!("unknown objective '{other}'"))),
        }
    }

    fn inner(&self) -> &dyn Objective {
        match self {
            BenchmarkFunction::SkewedQuartic(f) => f,
            BenchmarkFunction::TopSquares(f) => f,
        }
    }
}

impl Objective for BenchmarkFunction {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.inner().value(x)
    }
    fn gradient(&self, x: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
        self.inner().gradient(x)
    }
    fn min_value(&self) -> Option<f64> {
        self.inner().min_value()
    }
    fn sparsity(&self) -> Option<usize> {
        self.inner().sparsity()
    }
}

/// A fully parameterized benchmark case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub id: CaseId,
    pub function: BenchmarkFunction,
    pub oracle: OracleParams,
    pub s: usize,
    pub d: usize,
    pub m: usize,
    pub r: f64,
    /// Fixed step size.
    pub alpha: f64,
    pub line_search: SearchParams,
    pub warm_line_search: SearchParams,
    /// Value of the first `s` coordinates of the starting point; the rest are 0.
    pub x0_value: f64,
}

/// Default entry of the starting point's leading block.
pub const DEFAULT_X0_VALUE: f64 = 10.0;

pub fn make_case(id: CaseId) -> CaseSpec {
    let (s, d) = (CASE_SPARSITY, CASE_DIM);
    let (function, oracle, r) = match id {
        CaseId::A => (
            BenchmarkFunction::SkewedQuartic(SkewedQuartic::new(s, d).expect("valid")),
            OracleParams { kappa: 1.5, mu: 1.0, delta0: 0.5 },
            1.0 / (2.0 * (s as f64).sqrt()),
        ),
        CaseId::B => (
            BenchmarkFunction::TopSquares(TopSquares::new(s, d).expect("valid")),
            OracleParams { kappa: 1.5, mu: 4.0, delta0: 0.5 },
            1.0 / (2.0 * (s as f64).sqrt()),
        ),
        CaseId::C => (
            BenchmarkFunction::SkewedQuartic(SkewedQuartic::new(s, d).expect("valid")),
            OracleParams { kappa: 1.0, mu: 1.0, delta0: 0.3 },
            1e-4,
        ),
        CaseId::D => (
            BenchmarkFunction::TopSquares(TopSquares::new(s, d).expect("valid")),
            OracleParams { kappa: 1.0, mu: 1.0, delta0: 0.3 },
            1e-4,
        ),
    };
    CaseSpec {
        id,
        function,
        oracle,
        s,
        d,
        m: practical_m(s, d).expect("valid"),
        r,
        alpha: 2.0,
        line_search: SearchParams::new(2.0, 40, 0.05, 2.0).expect("valid"),
        warm_line_search: SearchParams::new(1e-4, 40, 0.05, 2.0).expect("valid"),
        x0_value: DEFAULT_X0_VALUE,
    }
}

impl CaseSpec {
    pub fn initial_point(&self) -> Array1<f64> {
        Array1::from_shape_fn(self.d, |i| if i < self.s { self.x0_value } else { 0.0 })
    }

    pub fn step_policy(&self, variant: StepVariant) -> StepPolicy {
        match variant {
            StepVariant::Fs => StepPolicy::Fixed { alpha: self.alpha },
            StepVariant::Ls => StepPolicy::LineSearch(self.line_search),
            StepVariant::Wsls => StepPolicy::WarmStartLineSearch(self.warm_line_search),
        }
    }

    pub fn scobo_config(&self, variant: StepVariant, budget: Budget, seed: u64) -> ScoboConfig {
        ScoboConfig::new(self.s, self.m, self.r, budget, self.step_policy(variant), seed)
    }

    pub fn oracle(&self, seed: u64) -> PolynomialOracle<BenchmarkFunction> {
        PolynomialOracle::new(self.function.clone(), self.oracle, oracle_seed(seed))
    }

    /// One seeded run against the simulated oracle, with diagnostics.
    pub fn run(&self, variant: StepVariant, budget: Budget, seed: u64) -> Result<RunTrace> {
        let mut oracle = self.oracle(seed);
        let config = self.scobo_config(variant, budget, seed);
        scobo_run(&mut oracle, &config, self.initial_point(), Some(&self.function))
    }

    /// The case in the flat `key = value` experiment format.
    pub fn to_config_string(&self) -> String {
        let ls = &self.line_search;
        let ws = &self.warm_line_search;
        [
            format!("case = {}", self.id),
            format!("objective = {}", self.function.name()),
            format!("s = {}", self.s),
            format!("d = {}", self.d),
            format!("kappa = {}", self.oracle.kappa),
            format!("mu = {}", self.oracle.mu),
            format!("delta0 = {}", self.oracle.delta0),
            format!("m = {}", self.m),
            format!("r = {}", self.r),
            format!("alpha = {}", self.alpha),
            format!("ls_alpha_def = {}", ls.alpha_default),
            format!("ls_trials = {}", ls.trials),
            format!("ls_omega = {}", ls.omega),
            format!("ls_psi = {}", ls.psi),
            format!("wsls_alpha_def = {}", ws.alpha_default),
            format!("wsls_trials = {}", ws.trials),
            format!("wsls_omega = {}", ws.omega),
            format!("wsls_psi = {}", ws.psi),
            format!("x0 = {}", self.x0_value),
        ]
        .join("\n")
            + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_a_parameters() {
        let c = make_case(CaseId::A);
        assert_eq!(c.function.name(), "skewed_quartic");
        assert_eq!((c.oracle.kappa, c.oracle.mu, c.oracle.delta0), (1.5, 1.0, 0.5));
        assert!((c.r - 0.111_803_398_874_989_48).abs() < 1e-15);
        assert_eq!((c.alpha, c.m, c.s, c.d), (2.0, 1565, 20, 500));
    }

    #[test]
    fn case_b_and_d_use_top_squares() {
        let b = make_case(CaseId::B);
        assert_eq!(b.function.name(), "top_s_squares");
        assert_eq!((b.oracle.kappa, b.oracle.mu, b.oracle.delta0), (1.5, 4.0, 0.5));
        let d = make_case(CaseId::D);
        assert_eq!(d.function.name(), "top_s_squares");
        assert_eq!((d.oracle.kappa, d.oracle.mu, d.oracle.delta0, d.r), (1.0, 1.0, 0.3, 1e-4));
    }

    #[test]
    fn case_c_parameters_and_line_search() {
        let c = make_case(CaseId::C);
        assert_eq!((c.oracle.kappa, c.oracle.mu, c.oracle.delta0), (1.0, 1.0, 0.3));
        assert_eq!((c.r, c.alpha, c.m), (1e-4, 2.0, 1565));
        let ls = c.line_search;
        assert_eq!((ls.alpha_default, ls.trials, ls.omega, ls.psi), (2.0, 40, 0.05, 2.0));
        assert_eq!(c.warm_line_search.alpha_default, 1e-4);
        assert!((c.oracle.correct_probability(0.123) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn config_string_is_exact() {
        let text = make_case(CaseId::C).to_config_string();
        let expect = "case = c\nobjective = skewed_quartic\ns = 20\nd = 500\nkappa = 1\nmu = 1\n\
                      delta0 = 0.3\nm = 1565\nr = 0.0001\nalpha = 2\nls_alpha_def = 2\nls_trials = 40\n\
                      ls_omega = 0.05\nls_psi = 2\nwsls_alpha_def = 0.0001\nwsls_trials = 40\n\
                      wsls_omega = 0.05\nwsls_psi = 2\nx0 = 10\n";
        assert_eq!(text, expect);
    }

    #[test]
    fn ids_parse() {
        assert_eq!("C".parse::<CaseId>().unwrap(), CaseId::C);
        assert!("e".parse::<CaseId>().is_err());
        assert_eq!("wsls".parse::<StepVariant>().unwrap(), StepVariant::Wsls);
        assert!("gd".parse::<StepVariant>().is_err());
    }
}
