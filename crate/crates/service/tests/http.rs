use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use ndarray::arr1;
use scobo::optimizer::{scobo_run, Budget, ScoboConfig, StepPolicy};
use scobo::{ComparisonOracle, Objective, OracleParams, PolynomialOracle};
use scobo_service::{router, DemoObjective, SessionStore};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(store: Arc<SessionStore>) -> Router {
    router(store, &[])
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

fn fixed_spec(seed: u64) -> Value {
    json!({
        "target": [0.8, 0.2, 0.4],
        "s": 3, "m": 12, "r": 0.05,
        "step": {"kind": "fixed", "alpha": 0.05},
        "seed": seed,
    })
}

async fn create(app: &Router, spec: Value) -> String {
    let (status, body) = call(app, "POST", "/sessions", Some(spec)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["session_id"].as_str().unwrap().to_string()
}

async fn query(app: &Router, id: &str) -> Value {
    let (status, body) = call(app, "GET", &format!("/sessions/{id}/query"), None).await;
    assert_eq!(status, StatusCode::OK);
    body
}

async fn answer(app: &Router, id: &str, query_id: &str, choice: i64) -> (StatusCode, Value) {
    call(app, "POST", &format!("/sessions/{id}/answer"), Some(json!({"query_id": query_id, "choice": choice}))).await
}

fn vec3(v: &Value) -> [f64; 3] {
    let a = v.as_array().unwrap();
    [a[0].as_f64().unwrap(), a[1].as_f64().unwrap(), a[2].as_f64().unwrap()]
}

/// Answer every pending query with `judge(x, y)` until the session finishes.
async fn drive(app: &Router, id: &str, mut judge: impl FnMut([f64; 3], [f64; 3]) -> i64) -> Vec<Value> {
    let mut seen = Vec::new();
    loop {
        let q = query(app, id).await;
        if q["status"] == "finished" {
            return seen;
        }
        let choice = judge(vec3(&q["candidate_x"]), vec3(&q["candidate_y"]));
        let (status, _) = answer(app, id, q["query_id"].as_str().unwrap(), choice).await;
        assert_eq!(status, StatusCode::OK);
        seen.push(q);
    }
}

#[tokio::test]
async fn first_query_is_pending_with_id_zero() {
    let app = app(Arc::new(SessionStore::new()));
    let id = create(&app, fixed_spec(0)).await;
    let q = query(&app, &id).await;
    assert_eq!(q["status"], "pending");
    assert_eq!(q["query_id"], "0");
    assert_eq!(q["kind"], "estimation");
    assert_eq!(q["candidate_x"], json!([0.5, 0.5, 0.5]));
    assert!(q["render"]["x_color"].as_str().unwrap().starts_with('#'));
    assert!(q["render"].get("target_color").is_none());
}

#[tokio::test]
async fn oversized_and_malformed_requests_are_rejected() {
    let app = app(Arc::new(SessionStore::new()));
    let mut spec = fixed_spec(0);
    spec["m"] = json!(1_000_000);
    let (status, body) = call(&app, "POST", "/sessions", Some(spec)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["reason"].as_str().unwrap().contains("m = 1000000"));

    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"m": 4}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"m": 4, "r": 0.1, "step": {"kind": "fixed", "alpha": 1}, "colour": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let id = create(&app, fixed_spec(0)).await;
    let (status, _) = answer(&app, &id, "0", 0).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let app = app(Arc::new(SessionStore::new()));
    for (method, path) in [("GET", "query"), ("GET", "state")] {
        let (status, body) = call(&app, method, &format!("/sessions/nope/{path}"), None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(body["error"], "unknown_session");
    }
    let (status, _) = answer(&app, "nope", "0", 1).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn repeated_answers_are_idempotent_and_stale_ones_conflict() {
    let app = app(Arc::new(SessionStore::new()));
    let id = create(&app, fixed_spec(0)).await;
    let (status, body) = answer(&app, &id, "0", 1).await;
    assert_eq!((status, body), (StatusCode::OK, json!({"accepted": true, "queries_answered": 1})));
    let (status, body) = answer(&app, &id, "0", 1).await;
    assert_eq!((status, body), (StatusCode::OK, json!({"accepted": true, "queries_answered": 1})));

    let before = call(&app, "GET", &format!("/sessions/{id}/state"), None).await.1;
    for (qid, choice) in [("0", -1), ("7", 1), ("x", 1)] {
        let (status, body) = answer(&app, &id, qid, choice).await;
        assert_eq!(status, StatusCode::CONFLICT);
        assert_eq!(body["accepted"], false);
        assert_eq!(body["queries_answered"], 1);
    }
    let after = call(&app, "GET", &format!("/sessions/{id}/state"), None).await.1;
    assert_eq!(before, after);
    assert_eq!(query(&app, &id).await["query_id"], "1");
}

#[tokio::test]
async fn blind_state_hides_the_target() {
    let app = app(Arc::new(SessionStore::new()));
    let id = create(&app, fixed_spec(0)).await;
    let (_, state) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(state["mode"], "blind");
    assert!(state.get("target").is_none());
    assert!(state.get("gap_history").is_none());

    let mut spec = fixed_spec(0);
    spec["mode"] = json!("practice");
    let id = create(&app, spec).await;
    let (_, state) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(state["target"], json!([0.8, 0.2, 0.4]));
    assert_eq!(state["gap_history"].as_array().unwrap().len(), 1);
    assert!(query(&app, &id).await["render"]["target_color"].is_string());
}

#[tokio::test]
async fn an_iteration_completes_after_m_answers() {
    let app = app(Arc::new(SessionStore::new()));
    let id = create(&app, fixed_spec(0)).await;
    for k in 0..12 {
        let q = query(&app, &id).await;
        assert_eq!(q["iteration"], 0);
        answer(&app, &id, &k.to_string(), if k % 2 == 0 { 1 } else { -1 }).await;
    }
    let (_, state) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(state["iteration"], 1);
    assert_eq!(state["queries_used"], 12);
    assert_ne!(state["current_x"], json!([0.5, 0.5, 0.5]));
}

#[tokio::test]
async fn line_search_queries_are_labelled() {
    let app = app(Arc::new(SessionStore::new()));
    let mut spec = fixed_spec(0);
    spec["step"] = json!({"kind": "line_search", "alpha_default": 0.2, "trials": 3, "omega": 0.05, "psi": 2.0});
    let id = create(&app, spec).await;
    for k in 0..12 {
        answer(&app, &id, &k.to_string(), 1).await;
    }
    assert_eq!(query(&app, &id).await["kind"], "line_search");
}

#[tokio::test]
async fn served_run_matches_the_in_process_optimizer() {
    let target = [0.8, 0.2, 0.4];
    let f = DemoObjective::new(target).unwrap().objective();
    let params = OracleParams::new(0.3, 1.0, 1.0).unwrap();
    for step in [json!({"kind": "fixed", "alpha": 0.05}), json!({"kind": "warm_line_search", "alpha_default": 0.1, "trials": 3, "omega": 0.05, "psi": 2.0})] {
        let app = app(Arc::new(SessionStore::new()));
        let mut spec = fixed_spec(7);
        spec["step"] = step.clone();
        spec["max_iterations"] = json!(10);
        let id = create(&app, spec.clone()).await;
        let mut oracle = PolynomialOracle::new(f.clone(), params, 99);
        drive(&app, &id, |x, y| oracle.query(arr1(&x).view(), arr1(&y).view()).unwrap().value() as i64).await;
        let (_, state) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;

        let session_spec: scobo_service::SessionSpec = serde_json::from_value(spec).unwrap();
        let policy = match serde_json::from_value(step).unwrap() {
            scobo_service::StepSpec::Fixed { alpha } => StepPolicy::Fixed { alpha },
            scobo_service::StepSpec::WarmLineSearch { alpha_default, trials, omega, psi } => StepPolicy::WarmStartLineSearch(
                scobo::optimizer::SearchParams::new(alpha_default, trials, omega, psi).unwrap(),
            ),
            _ => unreachable!(),
        };
        let config = ScoboConfig::new(3, 12, 0.05, Budget::Iterations(10), policy, session_spec.seed);
        let mut oracle = PolynomialOracle::new(f.clone(), params, 99);
        let trace = scobo_run(&mut oracle, &config, arr1(&[0.5; 3]), None).unwrap();
        assert_eq!(vec3(&state["current_x"]), [trace.final_x[0], trace.final_x[1], trace.final_x[2]]);
        assert_eq!(state["queries_used"], trace.total_queries);
        assert_eq!(state["finished"], true);
    }
}

#[tokio::test]
async fn truthful_answers_find_the_color() {
    let target = [0.8, 0.2, 0.4];
    let f = DemoObjective::new(target).unwrap().objective();
    let app = app(Arc::new(SessionStore::new()));
    let mut spec = fixed_spec(3);
    spec["max_iterations"] = json!(30);
    let id = create(&app, spec).await;
    let seen = drive(&app, &id, |x, y| {
        let d = f.value(arr1(&y).view()) - f.value(arr1(&x).view());
        if d >= 0.0 { 1 } else { -1 }
    })
    .await;
    assert_eq!(seen.len(), 30 * 12);
    let (_, state) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    let f0 = f.value(arr1(&[0.5; 3]).view());
    let f_final = f.value(arr1(&vec3(&state["current_x"])).view());
    assert!(f_final < f0 / 10.0, "{f0} -> {f_final}");
}

#[tokio::test]
async fn same_seed_same_queries() {
    let app = app(Arc::new(SessionStore::new()));
    let a = create(&app, fixed_spec(5)).await;
    let b = create(&app, fixed_spec(5)).await;
    for _ in 0..30 {
        let (qa, qb) = (query(&app, &a).await, query(&app, &b).await);
        assert_eq!(qa, qb);
        let id = qa["query_id"].as_str().unwrap();
        answer(&app, &a, id, 1).await;
        answer(&app, &b, id, 1).await;
    }
}

#[tokio::test]
async fn sessions_survive_a_snapshot_and_restore() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(SessionStore::new());
    let app1 = app(store.clone());
    let id = create(&app1, fixed_spec(2)).await;
    for k in 0..17 {
        answer(&app1, &id, &k.to_string(), if k % 3 == 0 { -1 } else { 1 }).await;
    }
    assert_eq!(store.snapshot(dir.path()).unwrap(), 1);

    let app2 = app(Arc::new(SessionStore::restore(dir.path()).unwrap()));
    assert_eq!(query(&app1, &id).await, query(&app2, &id).await);
    for k in 17..40 {
        let c = if k % 5 == 0 { 1 } else { -1 };
        assert_eq!(answer(&app1, &id, &k.to_string(), c).await, answer(&app2, &id, &k.to_string(), c).await);
    }
    let s1 = call(&app1, "GET", &format!("/sessions/{id}/state"), None).await.1;
    let s2 = call(&app2, "GET", &format!("/sessions/{id}/state"), None).await.1;
    assert_eq!(s1, s2);
    assert!(SessionStore::restore(&dir.path().join("missing")).unwrap().is_empty());
}
