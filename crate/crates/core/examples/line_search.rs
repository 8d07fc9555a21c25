//! Pick a step size along a descent direction using only noisy comparisons.
//!
//! `cargo run -p scobo --example line_search`

use ndarray::{arr1, Array1};
use scobo::benchmarks::Sphere;
use scobo::optimizer::{line_search, warm_line_search, SearchParams};
use scobo::{Objective, OracleParams, PolynomialOracle};

fn main() -> scobo::Result<()> {
    let f = Sphere::new(Array1::zeros(2));
    let x = arr1(&[4.0, 0.0]);
    // Along the exact descent direction the best step is 4.
    let g_hat = arr1(&[1.0, 0.0]);
    let mut oracle = PolynomialOracle::new(f.clone(), OracleParams::new(0.3, 1.0, 1.0)?, 3);

    let params = SearchParams::new(0.1, 40, 0.05, 2.0)?;
    let cold = line_search(&mut oracle, x.view(), g_hat.view(), params)?;
    println!("cold start from {}: alpha = {} after {} queries", 0.1, cold.alpha, cold.queries);

    let warm = warm_line_search(&mut oracle, x.view(), g_hat.view(), 3.0, params)?;
    println!("warm start from 3: alpha = {} after {} queries", warm.alpha, warm.queries);

    for (name, alpha) in [("cold", cold.alpha), ("warm", warm.alpha)] {
        let next = &x - &(alpha * &g_hat);
        println!("{name}: f {} -> {:.4}", f.value(x.view()), f.value(next.view()));
    }
    Ok(())
}
