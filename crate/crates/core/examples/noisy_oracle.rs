//! How often a noisy comparison oracle answers correctly, and how M-trial
//! averaging sharpens it.
//!
//! `cargo run -p scobo --example noisy_oracle`

use ndarray::arr1;
use scobo::benchmarks::Sphere;
use scobo::{ComparisonOracle, OracleParams, PolynomialOracle, Sign};

fn main() -> scobo::Result<()> {
    let params = OracleParams::new(0.3, 1.0, 2.0)?;
    let mut oracle = PolynomialOracle::new(Sphere::new(arr1(&[0.0, 0.0])), params, 7);
    let x = arr1(&[0.0, 0.0]);

    println!("{:>8} {:>10} {:>10}", "gap", "p(theory)", "observed");
    for &t in &[0.02, 0.1, 0.3, 1.0] {
        // y is worse than x by f(y) - f(x) = t^2.
        let y = arr1(&[t, 0.0]);
        let n = 20_000;
        let mut right = 0;
        for _ in 0..n {
            if oracle.query(x.view(), y.view())? == Sign::Plus {
                right += 1;
            }
        }
        let gap = t * t;
        println!("{gap:>8.4} {:>10.4} {:>10.4}", params.correct_probability(gap), right as f64 / n as f64);
    }

    let y = arr1(&[0.1, 0.0]);
    for trials in [1, 10, 40, 160] {
        let score = oracle.m_trial_query(x.view(), y.view(), trials)?;
        println!("M = {trials:>3}: score {:+.3}", score.value());
    }
    println!("{} queries spent", oracle.query_count());
    Ok(())
}
