//! Serve a suspended SCOBO run over HTTP so that a person, or any other
//! outside answerer, can play the comparison oracle.
//!
//! The demo objective is a hidden RGB color: each query shows two colors and
//! asks which is closer to the target. Answers follow the optimizer's sign
//! convention, `choice = sign(f(y) − f(x))`, so −1 means "y is better".
//! One query is pending per session at a time; the session advances only
//! when that query is answered.

pub mod api;
pub mod error;
pub mod session;
pub mod store;

pub use api::router;
pub use error::ServiceError;
pub use session::{
    render_color, Answer, AnswerReceipt, DemoObjective, Mode, QueryView, Rendering, Session, SessionSpec,
    StateView, StepSpec, DEMO_DIM, MAX_DEMO_M,
};
pub use store::SessionStore;
