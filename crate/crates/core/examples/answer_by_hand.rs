//! Drive the optimizer one query at a time, as an outside answerer would,
//! and park it to disk halfway through.
//!
//! Answers come from stdin ("+" or "-", meaning sign(f(y) - f(x))) when
//! `--interactive` is given; otherwise a truthful scripted answerer plays.
//!
//! `cargo run -p scobo --example answer_by_hand [-- --interactive]`

use std::io::BufRead;

use ndarray::arr1;
use scobo::benchmarks::Sphere;
use scobo::optimizer::{Budget, ScoboConfig, ScoboMachine, StepPolicy};
use scobo::{Objective, Sign};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let interactive = std::env::args().any(|a| a == "--interactive");
    let f = Sphere::new(arr1(&[0.8, 0.2, 0.4]));
    let config = ScoboConfig::new(3, 12, 0.05, Budget::Iterations(20), StepPolicy::Fixed { alpha: 0.05 }, 0);
    let mut machine = ScoboMachine::new(config, arr1(&[0.5, 0.5, 0.5]))?;
    let mut stdin = std::io::stdin().lock().lines();

    while let Some(q) = machine.pending_query() {
        let answer = if interactive {
            println!("x = {:.3}\ny = {:.3}\nis y worse (+) or better (-)?", q.x, q.y);
            match stdin.next().transpose()?.as_deref().map(str::trim) {
                Some("+") => Sign::Plus,
                Some("-") => Sign::Minus,
                _ => continue,
            }
        } else {
            Sign::of(f.value(q.y.view()) - f.value(q.x.view())).unwrap_or(Sign::Plus)
        };
        if let Some(report) = machine.answer(answer)? {
            println!("iteration {:>2}: f = {:.5}", report.iteration, f.value(machine.x()));
        }
        if machine.queries() == 120 {
            // The whole run, pending query included, is plain data.
            let saved = serde_json::to_string(&machine)?;
            machine = serde_json::from_str(&saved)?;
            println!("(suspended and resumed from {} bytes of JSON)", saved.len());
        }
    }
    println!("final x = {:.4} after {} answers", machine.x(), machine.queries());
    Ok(())
}
