//! HTTP API over an immutable index.
//!
//! | method | path           | body / query                                        |
//! |--------|----------------|-----------------------------------------------------|
//! | GET    | `/api/search`  | `q`, optional `k` (default 5, clamped to 1..=100)   |
//! | POST   | `/api/suggest` | `{"query"}`                                         |
//! | POST   | `/api/refine`  | `{"query", "accepted_terms", "accepted_descriptors"}` |
//! | POST   | `/api/ttest`   | `{"baseline": [..], "refined": [..]}`               |
//!
//! Errors come back as `{"error": "..."}`. Scores are the library values,
//! serialized at full precision.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use querylift_core::refine::{interactive_suggest, refine_query, RefineError};
use querylift_core::stats::{paired_t_test, StatsError};
use querylift_core::{DomainTerm, Index, PreprocessConfig, RefinementConfig, Retrieval, TTestResult};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_K: usize = 5;
pub const MAX_K: usize = 100;
pub const SNIPPET_CHARS: usize = 200;

pub struct AppState {
    pub index: Index,
    pub preprocess: PreprocessConfig,
    pub refinement: RefinementConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub doc_id: usize,
    pub url: String,
    pub title: String,
    pub score: f64,
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub query: String,
    pub hits: Vec<SearchHit>,
    pub out_of_vocabulary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestResponse {
    pub query: String,
    pub hits: Vec<SearchHit>,
    pub out_of_vocabulary: bool,
    pub domain_terms: Vec<DomainTerm>,
    pub descriptors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineResponse {
    pub refined_query: String,
    pub baseline: SearchResponse,
    pub refined: SearchResponse,
}

#[derive(Debug, Deserialize)]
struct SuggestRequest {
    query: String,
}

#[derive(Debug, Deserialize)]
struct RefineRequest {
    query: String,
    #[serde(default)]
    accepted_terms: Vec<String>,
    #[serde(default)]
    accepted_descriptors: Vec<String>,
    k: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct TTestRequest {
    baseline: Vec<f64>,
    refined: Vec<f64>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

fn non_empty(query: &str) -> Result<(), ApiError> {
    if query.trim().is_empty() {
        Err(ApiError::bad_request("query must not be empty"))
    } else {
        Ok(())
    }
}

fn snippet(text: &str) -> String {
    text.chars().take(SNIPPET_CHARS).collect()
}

fn hits_of(index: &Index, retrieval: &Retrieval) -> Vec<SearchHit> {
    retrieval
        .hits
        .iter()
        .map(|h| {
            let doc = index.doc(h.doc_id);
            SearchHit {
                doc_id: h.doc_id,
                url: doc.url.clone(),
                title: doc.title.clone(),
                score: h.score,
                snippet: snippet(&doc.text),
            }
        })
        .collect()
}

fn clamp_k(k: usize) -> usize {
    k.clamp(1, MAX_K)
}

/// Runs one search exactly as the library does; shared by the handlers.
pub fn search(state: &AppState, query: &str, k: usize) -> SearchResponse {
    let retrieval = state
        .index
        .retrieve_top_k(query, clamp_k(k), &state.preprocess)
        .expect("k is clamped to at least 1");
    SearchResponse {
        query: query.to_owned(),
        hits: hits_of(&state.index, &retrieval),
        out_of_vocabulary: retrieval.out_of_vocabulary,
    }
}

async fn search_handler(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Json<SearchResponse>, ApiError> {
    let q = params
        .get("q")
        .ok_or_else(|| ApiError::bad_request("missing parameter q"))?;
    non_empty(q)?;
    let k = match params.get("k") {
        None => DEFAULT_K,
        Some(raw) => {
            let k: i64 = raw
                .trim()
                .parse()
                .map_err(|_| ApiError::bad_request(format!("k must be an integer, got {raw:?}")))?;
            k.clamp(1, MAX_K as i64) as usize
        }
    };
    Ok(Json(search(&state, q, k)))
}

async fn suggest_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<SuggestResponse>, ApiError> {
    let req: SuggestRequest = parse_body(&body)?;
    non_empty(&req.query)?;
    let s = interactive_suggest(&req.query, &state.index, &state.preprocess, &state.refinement)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(Json(SuggestResponse {
        hits: hits_of(&state.index, &s.retrieval),
        out_of_vocabulary: s.retrieval.out_of_vocabulary,
        query: req.query,
        domain_terms: s.domain_terms,
        descriptors: s.descriptors,
    }))
}

async fn refine_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<RefineResponse>, ApiError> {
    let req: RefineRequest = parse_body(&body)?;
    non_empty(&req.query)?;
    let terms = req
        .accepted_terms
        .into_iter()
        .map(|t| DomainTerm::new(t, 1))
        .collect::<Result<Vec<_>, RefineError>>()
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    if req.accepted_descriptors.iter().any(|d| d.trim().is_empty()) {
        return Err(ApiError::bad_request("invalid term: empty descriptor"));
    }
    let refined_query = refine_query(&req.query, &terms, &req.accepted_descriptors, &state.preprocess);
    let k = req.k.unwrap_or(DEFAULT_K);
    Ok(Json(RefineResponse {
        baseline: search(&state, &req.query, k),
        refined: search(&state, &refined_query, k),
        refined_query,
    }))
}

async fn ttest_handler(body: Bytes) -> Result<Json<TTestResult>, ApiError> {
    let req: TTestRequest = parse_body(&body)?;
    paired_t_test(&req.baseline, &req.refined).map(Json).map_err(|e| {
        let status = match e {
            StatsError::NoConvergence { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    })
}

/// API routes with permissive CORS. When `static_dir` is given, other paths
/// are served from it.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/search", get(search_handler))
        .route("/api/suggest", post(suggest_handler))
        .route("/api/refine", post(refine_handler))
        .route("/api/ttest", post(ttest_handler))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}

/// Binds `addr` and serves until the process is stopped.
pub fn serve_blocking(addr: SocketAddr, app: Router) -> std::io::Result<()> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?
        .block_on(async move {
            let listener = tokio::net::TcpListener::bind(addr).await?;
            axum::serve(listener, app).await
        })
}
