use ndarray::{Array1, arr1};
use scobo::benchmarks::{make_case, CaseId, Sphere, StepVariant};
use scobo::estimator::MeasurementVariant;
use scobo::optimizer::{
    accuracy_floor, rho_star, scobo_run, Budget, QueryKind, ScoboConfig, ScoboMachine, SearchParams, StepPolicy,
};
use scobo::{ComparisonOracle, Objective, OracleParams, PolynomialOracle};

fn sphere10() -> (Sphere, Array1<f64>) {
    let f = Sphere::new(Array1::zeros(10));
    let x0: Array1<f64> = Array1::from_shape_fn(10, |i| if i % 3 == 0 { 0.5 } else { -0.3 });
    let x0 = &x0 / x0.dot(&x0).sqrt();
    (f, x0)
}

#[test]
fn noiseless_sphere_descends_to_the_floor() {
    let (f, x0) = sphere10();
    let eps = accuracy_floor(2.0, 0.05, rho_star(2.0, 2.0, 0.25).unwrap());
    for seed in 0..3 {
        let config = ScoboConfig::new(10, 200, 1e-3, Budget::Iterations(200), StepPolicy::Fixed { alpha: 0.05 }, seed);
        let mut oracle = PolynomialOracle::noiseless(f.clone(), seed);
        let trace = scobo_run(&mut oracle, &config, x0.clone(), Some(&f)).unwrap();
        let v = trace.values();
        assert_eq!(v.len(), 201);
        assert!(v[200] <= v[0]);
        for w in v.windows(2) {
            if w[0] > eps {
                assert!(w[1] <= w[0] + 1e-6, "seed {seed}: {} -> {}", w[0], w[1]);
            }
        }
        assert!(v[200] <= eps);
    }
}

#[test]
fn zero_iterations_return_the_start() {
    let (f, x0) = sphere10();
    let config = ScoboConfig::new(10, 200, 1e-3, Budget::Iterations(0), StepPolicy::Fixed { alpha: 0.05 }, 1);
    let mut oracle = PolynomialOracle::noiseless(f.clone(), 1);
    let trace = scobo_run(&mut oracle, &config, x0.clone(), Some(&f)).unwrap();
    assert_eq!(trace.final_x, x0);
    assert_eq!(trace.total_queries, 0);
    assert!(trace.records.is_empty());
    assert_eq!(oracle.query_count(), 0);
}

#[test]
fn update_identity_holds_exactly() {
    let spec = make_case(CaseId::C);
    for variant in StepVariant::ALL {
        let config = spec.scobo_config(variant, Budget::Iterations(4), 3);
        let mut oracle = spec.oracle(3);
        let mut machine = ScoboMachine::new(config, spec.initial_point()).unwrap();
        let mut iterations = 0;
        while let Some(q) = machine.pending_query() {
            let answer = oracle.query(q.x.view(), q.y.view()).unwrap();
            if let Some(rep) = machine.answer(answer).unwrap() {
                iterations += 1;
                let g = &rep.estimate.g_hat;
                for i in 0..g.len() {
                    assert_eq!(machine.x()[i], rep.x_before[i] - rep.step_size * g[i]);
                }
                assert!((g.dot(g).sqrt() - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(iterations, 4);
    }
}

#[test]
fn fixed_step_spends_exactly_m_per_iteration() {
    let spec = make_case(CaseId::A);
    let config = spec.scobo_config(StepVariant::Fs, Budget::Iterations(5), 0);
    let mut oracle = spec.oracle(0);
    let trace = scobo_run(&mut oracle, &config, spec.initial_point(), Some(&spec.function)).unwrap();
    assert_eq!(trace.total_queries, 5 * 1565);
    assert_eq!(oracle.query_count(), trace.total_queries);
    let cumulative: Vec<u64> = trace.records.iter().map(|r| r.queries).collect();
    assert_eq!(cumulative, vec![1565, 3130, 4695, 6260, 7825]);
}

#[test]
fn line_search_queries_are_accounted() {
    let spec = make_case(CaseId::C);
    for variant in [StepVariant::Ls, StepVariant::Wsls] {
        let config = spec.scobo_config(variant, Budget::Iterations(6), 2);
        let mut oracle = spec.oracle(2);
        let trace = scobo_run(&mut oracle, &config, spec.initial_point(), Some(&spec.function)).unwrap();
        assert_eq!(oracle.query_count(), trace.total_queries);
        let mut previous = 0;
        for r in &trace.records {
            let spent = r.queries - previous;
            // m estimation queries plus whole M-trial comparisons of 40 answers.
            assert!(spent > 1565);
            assert_eq!((spent - 1565) % 40, 0);
            previous = r.queries;
        }
    }
}

#[test]
fn query_budgets_are_never_exceeded() {
    let spec = make_case(CaseId::C);
    for variant in StepVariant::ALL {
        for budget in [0, 1564, 1565, 1700, 5000] {
            let trace = spec.run(variant, Budget::Queries(budget), 4).unwrap();
            assert!(trace.total_queries <= budget, "{variant} {budget}: {}", trace.total_queries);
            if budget < 1565 {
                assert!(trace.records.is_empty());
            }
        }
    }
}

#[test]
fn runs_are_reproducible_and_seed_sensitive() {
    let spec = make_case(CaseId::D);
    for variant in StepVariant::ALL {
        let a = spec.run(variant, Budget::Queries(8_000), 11).unwrap();
        let b = spec.run(variant, Budget::Queries(8_000), 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        let c = spec.run(variant, Budget::Queries(8_000), 12).unwrap();
        assert_ne!(a.final_x, c.final_x);
    }
}

#[test]
fn gaussian_measurements_also_descend() {
    let (f, x0) = sphere10();
    let config = ScoboConfig::new(10, 200, 1e-3, Budget::Iterations(60), StepPolicy::Fixed { alpha: 0.05 }, 5)
        .with_variant(MeasurementVariant::Gaussian);
    let mut oracle = PolynomialOracle::new(f.clone(), OracleParams::new(0.3, 1.0, 1.0).unwrap(), 5);
    let trace = scobo_run(&mut oracle, &config, x0.clone(), Some(&f)).unwrap();
    assert!(trace.values().last().unwrap() < &(0.5 * f.value(x0.view())));
}

#[test]
fn trace_csv_schema() {
    let spec = make_case(CaseId::C);
    let csv = spec.run(StepVariant::Fs, Budget::Queries(3200), 0).unwrap().to_csv_string();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,queries,step_size,f_value,opt_gap,flipped_frac,ghat_norm"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!((row[0], row[1], row[2]), ("0", "1565", "2"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn trace_without_diagnostics_leaves_fields_empty() {
    let spec = make_case(CaseId::C);
    let mut oracle = spec.oracle(0);
    let config = spec.scobo_config(StepVariant::Fs, Budget::Iterations(1), 0);
    let trace = scobo_run(&mut oracle, &config, spec.initial_point(), None).unwrap();
    let csv = trace.to_csv_string();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("0,1565,2,,,,"), "{row}");
    assert!(trace.values().is_empty());
}

#[test]
fn line_search_probes_walk_the_descent_ray() {
    let f = Sphere::new(arr1(&[0.0, 0.0]));
    let p = SearchParams::new(0.5, 3, 0.05, 2.0).unwrap();
    let config = ScoboConfig::new(2, 8, 1e-3, Budget::Iterations(1), StepPolicy::LineSearch(p), 9);
    let mut oracle = PolynomialOracle::noiseless(f, 9);
    let mut machine = ScoboMachine::new(config, arr1(&[3.0, 1.0])).unwrap();
    let mut g_hat = None;
    while let Some(q) = machine.pending_query() {
        if q.kind == QueryKind::LineSearch {
            let g: &Array1<f64> = g_hat.get_or_insert_with(|| {
                // Recover ĝ from the probe pair: y − x = −(ψ − 1)αĝ.
                let diff = &q.y - &q.x;
                -&diff / diff.dot(&diff).sqrt()
            });
            let ray = (&q.x - &arr1(&[3.0, 1.0])).dot(g);
            assert!(ray < 0.0, "probe must lie along −ĝ");
        }
        let a = oracle.query(q.x.view(), q.y.view()).unwrap();
        machine.answer(a).unwrap();
    }
    assert!(g_hat.is_some());
}
