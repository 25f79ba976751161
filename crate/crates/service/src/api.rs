//! `/api/v1` HTTP endpoints.
//!
//! Every error body is `{"code": ..., "message": ...}`, with an optional
//! `details` array for topology violations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use facetnet_core::catalog::{CatalogError, FacetIndex, FilterSpec, MatchMode, UrlTemplates};
use facetnet_core::explorer::{
    create_session, ExplorerError, Selection, SessionStore, ViewId, ViewKind,
};
use facetnet_core::network::{
    build_network, export_network, validate_topology, BuildOptions, ExportFormat, NetworkError,
    TopologySpec,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::ServiceConfig;

/// Shared, read-mostly service state: the immutable index plus sessions.
pub struct AppState {
    pub index: FacetIndex,
    pub sessions: SessionStore,
    pub urls: UrlTemplates,
    pub options: BuildOptions,
    pub default_mode: MatchMode,
}

impl AppState {
    pub fn new(index: FacetIndex, config: &ServiceConfig) -> Self {
        Self {
            index,
            sessions: SessionStore::new(config.session_cap()),
            urls: config.url_templates.clone(),
            options: config.build_options(),
            default_mode: config.within_facet_mode,
        }
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/facets", get(facets))
        .route("/api/v1/facets/{name}/values", post(facet_values))
        .route("/api/v1/network", post(network))
        .route("/api/v1/sessions", post(open_session))
        .route("/api/v1/sessions/{id}", get(get_session))
        .route("/api/v1/sessions/{id}/views", post(spawn_view))
        .route("/api/v1/sessions/{id}/views/{vid}", delete(close_view))
        .route("/api/v1/records/{*id}", get(record))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .with_state(state)
}

// ---------------------------------------------------------------------------
// errors

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    details: Option<Value>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            details: None,
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "code": self.code, "message": self.message });
        if let Some(details) = self.details {
            body["details"] = details;
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text())
    }
}

impl From<CatalogError> for ApiError {
    fn from(e: CatalogError) -> Self {
        let (status, code) = match &e {
            CatalogError::UnknownFacet(_) => (StatusCode::BAD_REQUEST, "unknown_facet"),
            CatalogError::EmptyClause(_) => (StatusCode::BAD_REQUEST, "empty_clause"),
            CatalogError::RecordNotFound(_) => (StatusCode::NOT_FOUND, "record_not_found"),
            CatalogError::BadTemplate(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<NetworkError> for ApiError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::Catalog(c) => c.into(),
            NetworkError::Topology(ref errors) => ApiError {
                details: serde_json::to_value(errors).ok(),
                ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_topology", e.to_string())
            },
            NetworkError::UnknownNode(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_node", e.to_string()),
            NetworkError::UnknownEdge(..) => ApiError::new(StatusCode::NOT_FOUND, "unknown_edge", e.to_string()),
            NetworkError::NoThematic => ApiError::new(StatusCode::CONFLICT, "no_thematic", e.to_string()),
            NetworkError::UnsupportedFormat(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "unsupported_format", e.to_string())
            }
            NetworkError::Import(_) => ApiError::internal(e.to_string()),
        }
    }
}

impl From<ExplorerError> for ApiError {
    fn from(e: ExplorerError) -> Self {
        match e {
            ExplorerError::Network(n) => n.into(),
            ExplorerError::UnknownView(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_view", e.to_string()),
            ExplorerError::WrongParentKind { .. } => {
                ApiError::new(StatusCode::CONFLICT, "wrong_parent_kind", e.to_string())
            }
            ExplorerError::InvalidSelection(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_selection", e.to_string())
            }
            ExplorerError::CloseRoot => ApiError::new(StatusCode::CONFLICT, "close_root", e.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    Ok(payload?.0)
}

/// Runs CPU-bound work off the async workers.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

// ---------------------------------------------------------------------------
// request bodies

/// Wire form of a filter; the mode falls back to the configured default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterBody {
    #[serde(default)]
    pub clauses: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub within_facet_mode: Option<MatchMode>,
}

impl FilterBody {
    fn resolve(self, default_mode: MatchMode) -> FilterSpec {
        FilterSpec {
            clauses: self.clauses,
            within_facet_mode: self.within_facet_mode.unwrap_or(default_mode),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesRequest {
    #[serde(default)]
    pub filter: FilterBody,
}

/// Optional per-request ceilings; they can only tighten the configured ones.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsBody {
    pub max_nodes: Option<usize>,
    pub max_edges: Option<usize>,
    #[serde(default)]
    pub hide_isolated: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkRequest {
    #[serde(default)]
    pub filter: FilterBody,
    pub topology: TopologySpec,
    #[serde(default)]
    pub options: OptionsBody,
    /// `json` (default) or `graphml`.
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewRequest {
    pub parent: ViewId,
    pub kind: ViewKind,
    pub selection: Selection,
}

impl AppState {
    fn options(&self, req: OptionsBody) -> BuildOptions {
        BuildOptions {
            max_nodes: req.max_nodes.map_or(self.options.max_nodes, |n| n.min(self.options.max_nodes)),
            max_edges: req.max_edges.map_or(self.options.max_edges, |n| n.min(self.options.max_edges)),
            hide_isolated: req.hide_isolated,
        }
    }
}

// ---------------------------------------------------------------------------
// handlers

#[derive(Serialize)]
struct Health<'a> {
    status: &'static str,
    records: usize,
    source: &'a str,
}

async fn health(State(state): State<Shared>) -> Response {
    Json(Health {
        status: "ok",
        records: state.index.len(),
        source: state.index.source_label(),
    })
    .into_response()
}

async fn facets(State(state): State<Shared>) -> Response {
    Json(json!({ "facets": state.index.facet_summaries() })).into_response()
}

async fn facet_values(
    State(state): State<Shared>,
    Path(name): Path<String>,
    payload: Result<Json<ValuesRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let req = body(payload)?;
    let filter = req.filter.resolve(state.default_mode);
    let values = state.index.facet_values(&name, &filter)?;
    Ok(Json(json!({ "facet": name, "values": values })).into_response())
}

async fn network(
    State(state): State<Shared>,
    payload: Result<Json<NetworkRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let req = body(payload)?;
    let format = match req.format.as_deref() {
        None => ExportFormat::NodeLinkJson,
        Some(f) => f.parse::<ExportFormat>().map_err(ApiError::from)?,
    };
    blocking(move || {
        let filter = req.filter.resolve(state.default_mode);
        let valid = validate_topology(&req.topology, state.index.schema()).map_err(NetworkError::from)?;
        let net = build_network(&state.index, &filter, &valid, &state.options(req.options))?;
        let content_type = match format {
            ExportFormat::NodeLinkJson => "application/json",
            ExportFormat::GraphMl => "application/graphml+xml",
        };
        Ok(([(header::CONTENT_TYPE, content_type)], export_network(&net, format)).into_response())
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionRequest {
    #[serde(default)]
    filter: FilterBody,
    topology: TopologySpec,
    #[serde(default)]
    options: OptionsBody,
}

async fn open_session(
    State(state): State<Shared>,
    payload: Result<Json<SessionRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let req = body(payload)?;
    blocking(move || {
        let filter = req.filter.resolve(state.default_mode);
        let session = create_session(
            &state.index,
            &filter,
            &req.topology,
            &state.options(req.options),
            state.urls.clone(),
        )?;
        let out = json!({
            "session_id": session.id(),
            "created_at": session.created_at(),
            "root": session.root(),
        });
        state.sessions.insert(session);
        Ok((StatusCode::CREATED, Json(out)).into_response())
    })
    .await
}

fn session_handle(state: &AppState, id: &str) -> ApiResult<facetnet_core::explorer::SessionHandle> {
    state
        .sessions
        .get(id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_session", format!("session {id:?} not found")))
}

async fn get_session(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    blocking(move || {
        let handle = session_handle(&state, &id)?;
        let session = handle.lock().map_err(|_| ApiError::internal("session lock poisoned"))?;
        let views: Vec<_> = session.views().collect();
        Ok(Json(json!({
            "session_id": session.id(),
            "created_at": session.created_at(),
            "views": views,
        }))
        .into_response())
    })
    .await
}

async fn spawn_view(
    State(state): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<ViewRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let req = body(payload)?;
    blocking(move || {
        let handle = session_handle(&state, &id)?;
        let mut session = handle.lock().map_err(|_| ApiError::internal("session lock poisoned"))?;
        let view = session.spawn(&state.index, req.parent, req.kind, &req.selection)?;
        Ok((StatusCode::CREATED, Json(view)).into_response())
    })
    .await
}

async fn close_view(
    State(state): State<Shared>,
    Path((id, vid)): Path<(String, String)>,
) -> ApiResult<Response> {
    let vid: ViewId = vid
        .parse()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", format!("view id {vid:?} is not a number")))?;
    blocking(move || {
        let handle = session_handle(&state, &id)?;
        let mut session = handle.lock().map_err(|_| ApiError::internal("session lock poisoned"))?;
        let closed = session.close_view(vid)?;
        Ok(Json(json!({ "closed": closed })).into_response())
    })
    .await
}

async fn record(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let record = state.index.record_by_id(&id)?;
    Ok(Json(json!({
        "record": record,
        "url": state.urls.external_url(&record.id),
    }))
    .into_response())
}
