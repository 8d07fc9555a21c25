//! HTTP routes.
//!
//! | method | path                     | body / response                 |
//! |--------|--------------------------|---------------------------------|
//! | POST   | `/sessions`              | [`SessionSpec`] → `{session_id}` |
//! | GET    | `/sessions/{id}/query`   | [`QueryView`]                   |
//! | POST   | `/sessions/{id}/answer`  | [`Answer`] → [`AnswerReceipt`]  |
//! | GET    | `/sessions/{id}/state`   | [`StateView`]                   |

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

use crate::error::ServiceError;
use crate::session::{Answer, AnswerReceipt, QueryView, SessionSpec, StateView};
use crate::store::SessionStore;

type Shared = Arc<SessionStore>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload.map(|Json(v)| v).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

async fn create(
    State(store): State<Shared>,
    payload: Result<Json<SessionSpec>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ServiceError> {
    let id = store.create(&body(payload)?)?;
    Ok((StatusCode::CREATED, Json(json!({ "session_id": id }))))
}

async fn next_query(State(store): State<Shared>, Path(id): Path<String>) -> Result<Json<QueryView>, ServiceError> {
    let session = store.get(&id)?;
    let view = session.lock().expect("session lock").next_query();
    Ok(Json(view))
}

async fn answer(
    State(store): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<Answer>, JsonRejection>,
) -> Result<Json<AnswerReceipt>, ServiceError> {
    let answer = body(payload)?;
    let session = store.get(&id)?;
    let receipt = session.lock().expect("session lock").submit(&answer)?;
    Ok(Json(receipt))
}

async fn state(State(store): State<Shared>, Path(id): Path<String>) -> Result<Json<StateView>, ServiceError> {
    let session = store.get(&id)?;
    let view = session.lock().expect("session lock").state();
    Ok(Json(view))
}

/// CORS policy: a list of allowed origins, or any origin when empty.
pub fn cors(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origins.is_empty() {
        layer.allow_origin(Any)
    } else {
        let list: Vec<HeaderValue> = origins.iter().filter_map(|o| o.parse().ok()).collect();
        layer.allow_origin(list)
    }
}

pub fn router(store: Shared, allowed_origins: &[String]) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/query", get(next_query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/state", get(state))
        .layer(cors(allowed_origins))
        .with_state(store)
}
