//! One optimization run whose oracle is an outside answerer.

use ndarray::{arr1, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scobo::benchmarks::Sphere;
use scobo::optimizer::{Budget, QueryKind, ScoboConfig, ScoboMachine, SearchParams, StepPolicy};
use scobo::{Objective, Sign};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Demo sessions are answered by people, so each estimate is capped at this
/// many comparisons.
pub const MAX_DEMO_M: usize = 64;
pub const DEMO_DIM: usize = 3;
const DEFAULT_ITERATIONS: u64 = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Nothing about the objective is revealed.
    #[default]
    Blind,
    /// The target and the gap history are shown.
    Practice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSpec {
    Fixed { alpha: f64 },
    ExpDecay { alpha0: f64, gamma: f64 },
    LineSearch { alpha_default: f64, trials: u32, omega: f64, psi: f64 },
    WarmLineSearch { alpha_default: f64, trials: u32, omega: f64, psi: f64 },
}

impl StepSpec {
    fn policy(&self) -> Result<StepPolicy, ServiceError> {
        Ok(match *self {
            StepSpec::Fixed { alpha } => StepPolicy::Fixed { alpha },
            StepSpec::ExpDecay { alpha0, gamma } => StepPolicy::ExpDecay { alpha0, gamma },
            StepSpec::LineSearch { alpha_default, trials, omega, psi } => {
                StepPolicy::LineSearch(SearchParams::new(alpha_default, trials, omega, psi)?)
            }
            StepSpec::WarmLineSearch { alpha_default, trials, omega, psi } => {
                StepPolicy::WarmStartLineSearch(SearchParams::new(alpha_default, trials, omega, psi)?)
            }
        })
    }
}

/// Body of `POST /sessions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSpec {
    /// Hidden RGB target in `[0, 1]³`; drawn from `seed` when absent.
    #[serde(default)]
    pub target: Option<[f64; 3]>,
    /// Starting color; mid-gray when absent.
    #[serde(default)]
    pub x0: Option<[f64; 3]>,
    #[serde(default = "default_s")]
    pub s: usize,
    pub m: usize,
    pub r: f64,
    pub step: StepSpec,
    #[serde(default)]
    pub seed: u64,
    /// Stop after this many iterations (default 30) ...
    #[serde(default)]
    pub max_iterations: Option<u64>,
    /// ... or after this many answers, if set instead.
    #[serde(default)]
    pub max_queries: Option<u64>,
    #[serde(default)]
    pub mode: Mode,
}

fn default_s() -> usize {
    DEMO_DIM
}

/// `f(x) = ‖x − x*‖²` over RGB colors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoObjective {
    target: [f64; 3],
}

impl DemoObjective {
    pub fn new(target: [f64; 3]) -> Result<Self, ServiceError> {
        if target.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(ServiceError::BadRequest("target must lie in [0, 1]^3".into()));
        }
        Ok(Self { target })
    }

    /// A target drawn uniformly from the color cube.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7A26_E7C0_10B5_D00D);
        Self { target: [rng.random(), rng.random(), rng.random()] }
    }

    pub fn target(&self) -> [f64; 3] {
        self.target
    }

    pub fn objective(&self) -> Sphere {
        Sphere::new(arr1(&self.target))
    }

    pub fn value(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.objective().value(x)
    }
}

/// A candidate clipped to the color cube, as `#rrggbb`.
pub fn render_color(x: ArrayView1<'_, f64>) -> String {
    let byte = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", byte(x[0]), byte(x[1]), byte(x[2]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rendering {
    pub x_color: String,
    pub y_color: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_color: Option<String>,
}

/// Body of `GET /sessions/{id}/query`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum QueryView {
    Pending {
        query_id: String,
        candidate_x: Vec<f64>,
        candidate_y: Vec<f64>,
        kind: QueryKind,
        iteration: u64,
        render: Rendering,
    },
    Finished,
}

/// Body of `POST /sessions/{id}/answer`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Answer {
    pub query_id: String,
    /// `sign(f(y) − f(x))` as judged by the answerer: −1 means y is better.
    pub choice: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnswerReceipt {
    pub accepted: bool,
    pub queries_answered: u64,
}

/// Body of `GET /sessions/{id}/state`. Practice-only fields are omitted,
/// not nulled, in blind mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub session_id: String,
    pub mode: Mode,
    pub iteration: u64,
    pub queries_used: u64,
    pub current_x: Vec<f64>,
    pub finished: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_history: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Session {
    id: String,
    mode: Mode,
    demo: DemoObjective,
    machine: ScoboMachine,
    /// The last accepted answer, replayable as an idempotent no-op.
    last_answer: Option<(u64, Sign)>,
    /// Gap at `x₀, x₁, …`.
    gaps: Vec<f64>,
}

impl Session {
    pub fn create(id: String, spec: &SessionSpec) -> Result<Self, ServiceError> {
        if spec.m > MAX_DEMO_M {
            return Err(ServiceError::BadRequest(format!(
                "m = {} exceeds the human budget of {MAX_DEMO_M} comparisons per estimate",
                spec.m
            )));
        }
        let demo = match spec.target {
            Some(t) => DemoObjective::new(t)?,
            None => DemoObjective::random(spec.seed),
        };
        let x0 = arr1(&spec.x0.unwrap_or([0.5; 3]));
        let budget = match (spec.max_iterations, spec.max_queries) {
            (Some(_), Some(_)) => {
                return Err(ServiceError::BadRequest("set max_iterations or max_queries, not both".into()));
            }
            (_, Some(q)) => Budget::Queries(q),
            (k, None) => Budget::Iterations(k.unwrap_or(DEFAULT_ITERATIONS)),
        };
        let config = ScoboConfig::new(spec.s, spec.m, spec.r, budget, spec.step.policy()?, spec.seed);
        let gaps = vec![demo.value(x0.view())];
        let machine = ScoboMachine::new(config, x0)?;
        Ok(Self { id, mode: spec.mode, demo, machine, last_answer: None, gaps })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn x(&self) -> ArrayView1<'_, f64> {
        self.machine.x()
    }

    pub fn next_query(&self) -> QueryView {
        let Some(q) = self.machine.pending_query() else {
            return QueryView::Finished;
        };
        let render = Rendering {
            x_color: render_color(q.x.view()),
            y_color: render_color(q.y.view()),
            target_color: (self.mode == Mode::Practice).then(|| render_color(arr1(&self.demo.target).view())),
        };
        QueryView::Pending {
            query_id: self.machine.queries().to_string(),
            candidate_x: q.x.to_vec(),
            candidate_y: q.y.to_vec(),
            kind: q.kind,
            iteration: self.machine.iteration(),
            render,
        }
    }

    /// Apply an answer. Re-sending the last accepted answer is accepted
    /// without effect; any other non-pending id is a conflict.
    pub fn submit(&mut self, answer: &Answer) -> Result<AnswerReceipt, ServiceError> {
        let choice = match answer.choice {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            other => return Err(ServiceError::BadRequest(format!("choice must be -1 or +1, got {other}"))),
        };
        let answered = self.machine.queries();
        let Ok(id) = answer.query_id.parse::<u64>() else {
            return Err(ServiceError::Conflict { reason: format!("unknown query id '{}'", answer.query_id), answered });
        };
        if self.last_answer == Some((id, choice)) {
            return Ok(AnswerReceipt { accepted: true, queries_answered: answered });
        }
        if id != answered || self.machine.is_finished() {
            return Err(ServiceError::Conflict {
                reason: format!("query {id} is not the pending query"),
                answered,
            });
        }
        if self.machine.answer(choice)?.is_some() {
            self.gaps.push(self.demo.value(self.machine.x()));
        }
        self.last_answer = Some((id, choice));
        Ok(AnswerReceipt { accepted: true, queries_answered: self.machine.queries() })
    }

    pub fn state(&self) -> StateView {
        let practice = self.mode == Mode::Practice;
        StateView {
            session_id: self.id.clone(),
            mode: self.mode,
            iteration: self.machine.iteration(),
            queries_used: self.machine.queries(),
            current_x: self.machine.x().to_vec(),
            finished: self.machine.is_finished(),
            target: practice.then(|| self.demo.target.to_vec()),
            gap_history: practice.then(|| self.gaps.clone()),
        }
    }

    /// Diagnostic objective value at the current iterate; never served in blind mode.
    pub fn value(&self) -> f64 {
        self.demo.value(self.machine.x())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SessionSpec {
        SessionSpec {
            target: Some([0.9, 0.1, 0.3]),
            x0: None,
            s: 3,
            m: 12,
            r: 0.05,
            step: StepSpec::Fixed { alpha: 0.05 },
            seed: 1,
            max_iterations: Some(2),
            max_queries: None,
            mode: Mode::Blind,
        }
    }

    #[test]
    fn colors_are_clipped() {
        assert_eq!(render_color(arr1(&[1.4, -0.2, 0.5]).view()), "#ff0080");
    }

    #[test]
    fn human_budget_guard() {
        let mut s = spec();
        s.m = 1_000_000;
        assert!(matches!(Session::create("a".into(), &s), Err(ServiceError::BadRequest(_))));
        s.m = MAX_DEMO_M;
        assert!(Session::create("a".into(), &s).is_ok());
    }

    #[test]
    fn bad_specs_rejected() {
        let mut s = spec();
        s.target = Some([1.5, 0.0, 0.0]);
        assert!(Session::create("a".into(), &s).is_err());
        let mut s = spec();
        s.s = 4;
        assert!(Session::create("a".into(), &s).is_err());
        let mut s = spec();
        s.step = StepSpec::LineSearch { alpha_default: 0.1, trials: 3, omega: 0.05, psi: 1.0 };
        assert!(Session::create("a".into(), &s).is_err());
        let mut s = spec();
        s.max_queries = Some(4);
        assert!(Session::create("a".into(), &s).is_err());
    }

    #[test]
    fn answers_advance_and_repeat_idempotently() {
        let mut session = Session::create("a".into(), &spec()).unwrap();
        let QueryView::Pending { query_id, .. } = session.next_query() else { panic!() };
        assert_eq!(query_id, "0");
        let a = Answer { query_id: "0".into(), choice: -1 };
        assert_eq!(session.submit(&a).unwrap(), AnswerReceipt { accepted: true, queries_answered: 1 });
        assert_eq!(session.submit(&a).unwrap(), AnswerReceipt { accepted: true, queries_answered: 1 });
        // Same id with the other choice is stale, not a second answer.
        assert!(session.submit(&Answer { query_id: "0".into(), choice: 1 }).is_err());
        assert!(session.submit(&Answer { query_id: "5".into(), choice: 1 }).is_err());
        assert!(session.submit(&Answer { query_id: "1".into(), choice: 0 }).is_err());
        assert_eq!(session.state().queries_used, 1);
    }

    #[test]
    fn random_targets_are_seeded() {
        assert_eq!(DemoObjective::random(3), DemoObjective::random(3));
        assert_ne!(DemoObjective::random(3), DemoObjective::random(4));
        assert!(DemoObjective::random(9).target().iter().all(|v| (0.0..1.0).contains(v)));
    }
}
