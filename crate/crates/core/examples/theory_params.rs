//! Parameters under which the convergence guarantee holds, next to the
//! much cheaper settings used in practice.
//!
//! `cargo run -p scobo --example theory_params`

use scobo::estimator::{practical_m, theoretical_m};
use scobo::optimizer::theory_params;

fn main() -> scobo::Result<()> {
    let (s, d) = (20, 500);
    // f(x) = ||x||^2 has L = nu = 2; start at distance 10 from the minimum.
    let t = theory_params(2.0, 2.0, 0.25, 0.01, 10.0, 0.3, s, d, 1.0)?;
    println!("rho*        {:.4}", t.rho_star);
    println!("iterations  {}", t.iterations);
    println!("m           {}", t.m);
    println!("r           {:.3e}", t.r);
    println!("epsilon     {:.3e}", t.epsilon);
    println!("queries     {}", t.total_queries());
    println!();
    println!("estimator-only m at eta = 0.25: {}", theoretical_m(s, d, 0.25, 0.3, 1.0)?);
    println!("rule-of-thumb m:               {}", practical_m(s, d)?);
    Ok(())
}
