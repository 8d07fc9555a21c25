//! Comparison-oracle optimization with one-bit compressed-sensing gradient
//! estimates.
//!
//! The optimizer only ever asks "is `f(y)` smaller than `f(x)`?" and gets a
//! possibly wrong ±1 answer back. Gradient directions are recovered from many
//! such answers with a sparsity-aware program, then a step is taken along the
//! estimate with a fixed, decaying or comparison-based line-searched step size.
//!
//! Entry points:
//! - [`oracle::PolynomialOracle`] simulates noisy comparisons of an [`Objective`].
//! - [`estimator::one_bit_grad_est`] produces one gradient-direction estimate.
//! - [`optimizer::scobo_run`] runs the full loop; [`optimizer::ScoboMachine`]
//!   exposes the same loop one query at a time for external (human) oracles.
//! - [`benchmarks::make_case`] builds the four standard test cases.

// `!(x > 0.0)` is how parameter checks reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod objective;
pub mod optimizer;
pub mod oracle;
pub mod validation;

pub use error::{Error, Result};
pub use objective::Objective;
pub use oracle::{ComparisonOracle, OracleParams, PolynomialOracle, Sign, TrialScore};
