//! Recover the direction of a sparse gradient from one-bit comparisons and
//! watch the error fall as the number of measurements grows.
//!
//! `cargo run -p scobo --example gradient_estimate`

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scobo::benchmarks::Linear;
use scobo::estimator::{one_bit_grad_est, practical_m, MeasurementVariant};
use scobo::{Objective, OracleParams, PolynomialOracle};

fn main() -> scobo::Result<()> {
    let (s, d) = (10, 200);
    let w = Array1::from_shape_fn(d, |i| if i < s { 1.0 + i as f64 / s as f64 } else { 0.0 });
    let f = Linear::new(w);
    let x = Array1::zeros(d);
    let g = f.gradient(x.view()).expect("linear functions know their gradient");
    let unit = &g / g.dot(&g).sqrt();

    let mut oracle = PolynomialOracle::new(f, OracleParams::new(0.3, 1.0, 1.0)?, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("rule-of-thumb m for s = {s}, d = {d}: {}", practical_m(s, d)?);
    println!("{:>6} {:>12} {:>10}", "m", "||g^ - g||", "support");
    for m in [50, 200, 800, 3200] {
        let est = one_bit_grad_est(&mut oracle, x.view(), s, m, 1e-3, MeasurementVariant::default(), &mut rng)?;
        let err = (&est.g_hat - &unit).mapv(|v| v * v).sum().sqrt();
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| est.g_hat[b].abs().total_cmp(&est.g_hat[a].abs()));
        let hits = idx[..s].iter().filter(|&&i| i < s).count();
        println!("{m:>6} {err:>12.4} {:>7}/{s}", hits);
    }
    Ok(())
}
