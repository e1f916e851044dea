//! JSON HTTP interface to a [`TriageSession`].

use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use super::{TriageError, TriageSession, ViewFilter, DEFAULT_ALPHA};
use crate::frontend::ElementId;
use crate::representations::Representation;

pub type Shared = Arc<Mutex<TriageSession>>;

pub struct ApiError(StatusCode, String);

impl From<TriageError> for ApiError {
    fn from(e: TriageError) -> Self {
        let code = match e {
            TriageError::UnknownPrediction(_) | TriageError::UnknownRepresentation(_) => StatusCode::NOT_FOUND,
            TriageError::InvalidAlpha(_) => StatusCode::BAD_REQUEST,
            TriageError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn lock(s: &Shared) -> MutexGuard<'_, TriageSession> {
    s.lock().unwrap_or_else(|p| p.into_inner())
}

#[derive(Deserialize)]
struct ListQuery {
    min_score: Option<f64>,
    #[serde(default)]
    include_banned: bool,
    rep: Option<String>,
}

#[derive(Deserialize, Default)]
struct AlphaBody {
    alpha: Option<f64>,
}

#[derive(Deserialize)]
struct ToggleBody {
    rep: String,
    hidden: bool,
}

pub fn router(session: Shared) -> Router {
    Router::new()
        .route("/api/predictions", get(list))
        .route("/api/representations", get(representations))
        .route("/api/representations/toggle", post(toggle))
        .route("/api/predictions/{id}/ban", post(ban))
        .route("/api/predictions/{id}/ban-similar", post(ban_similar))
        .route("/api/predictions/{id}/unban", post(unban))
        .route("/api/predictions/{id}/accept", post(accept))
        .route("/api/export", get(export))
        .route("/api/stats", get(stats))
        .with_state(session)
}

async fn list(State(s): State<Shared>, Query(q): Query<ListQuery>) -> ApiResult {
    let filter =
        ViewFilter { min_score: q.min_score, include_banned: q.include_banned, rep: q.rep.map(Representation::from) };
    let rows = lock(&s).view(&filter);
    Ok(Json(json!({ "count": rows.len(), "predictions": rows })))
}

async fn representations(State(s): State<Shared>) -> ApiResult {
    Ok(Json(json!(lock(&s).representations())))
}

async fn ban(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let dismissed = lock(&s).ban(&ElementId(id))?;
    Ok(Json(json!({ "dismissed": dismissed })))
}

async fn ban_similar(State(s): State<Shared>, Path(id): Path<String>, body: Option<Json<AlphaBody>>) -> ApiResult {
    let alpha = body.and_then(|b| b.0.alpha).unwrap_or(DEFAULT_ALPHA);
    let dismissed = lock(&s).ban_similar(&ElementId(id), alpha)?;
    Ok(Json(json!({ "alpha": alpha, "dismissed": dismissed })))
}

async fn unban(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let id = ElementId(id);
    lock(&s).unban(&id)?;
    Ok(Json(json!({ "restored": [id] })))
}

async fn accept(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let id = ElementId(id);
    lock(&s).accept(&id)?;
    Ok(Json(json!({ "accepted": id })))
}

async fn toggle(State(s): State<Shared>, Json(b): Json<ToggleBody>) -> ApiResult {
    let rep = Representation::from(b.rep.as_str());
    let mut g = lock(&s);
    g.toggle_representation(&rep, b.hidden)?;
    Ok(Json(json!({ "rep": rep, "hidden": b.hidden, "visible": g.stats().visible })))
}

async fn export(State(s): State<Shared>) -> ApiResult {
    Ok(Json(json!(lock(&s).export())))
}

async fn stats(State(s): State<Shared>) -> ApiResult {
    Ok(Json(json!(lock(&s).stats())))
}

/// Serves until Ctrl-C.
pub async fn serve(session: Shared, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(session))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
