//! JSON-over-HTTP annotation service. The knowledge base and index are
//! loaded once and shared read-only; each request runs in its own blocking
//! task behind a bounded worker pool, so requests never share mutable
//! state.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Semaphore;

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::{disambiguate_document, GraphConfig};
use crate::harness::Strategy;
use crate::index::InvertedIndex;
use crate::kb::{Annotation, KnowledgeBase, Label, Query, QueryType};
use crate::topic::{self, TopicConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: String,
    pub kb_path: PathBuf,
    /// Prebuilt index file; omitted, the index is built from the KB at
    /// startup.
    #[serde(default)]
    pub index_path: Option<PathBuf>,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default = "default_worker_slots")]
    pub worker_slots: usize,
    #[serde(default)]
    pub graph: GraphConfig,
    #[serde(default)]
    pub topic: TopicConfig,
}

fn default_listen() -> String {
    "127.0.0.1:8080".to_string()
}

fn default_strategy() -> Strategy {
    Strategy::Graph
}

fn default_timeout() -> f64 {
    600.0
}

fn default_worker_slots() -> usize {
    4
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return Err(Error::Config(format!(
                "timeout_s must be positive, got {}",
                self.timeout_s
            )));
        }
        if self.worker_slots < 1 {
            return Err(Error::Config("worker_slots must be at least 1".into()));
        }
        self.graph.validate()?;
        self.topic.hp.validate()?;
        self.topic.sampler.validate()
    }
}

pub fn load_service_config(path: impl AsRef<std::path::Path>) -> Result<ServiceConfig> {
    let text = std::fs::read_to_string(path)?;
    let config: ServiceConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("bad service config: {e}")))?;
    config.validate()?;
    Ok(config)
}

pub struct ServiceState {
    pub kb: KnowledgeBase,
    pub index: InvertedIndex,
    pub config: ServiceConfig,
    slots: Semaphore,
}

impl ServiceState {
    pub fn new(kb: KnowledgeBase, index: InvertedIndex, config: ServiceConfig) -> Result<Self> {
        config.validate()?;
        let slots = Semaphore::new(config.worker_slots);
        Ok(ServiceState {
            kb,
            index,
            config,
            slots,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisambiguateRequest {
    pub text: String,
    #[serde(default)]
    pub strategy: Option<Strategy>,
    /// Capped by the service-wide timeout.
    #[serde(default)]
    pub timeout_s: Option<f64>,
    /// Query name for the topic strategy.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// False omits runtime_s so identical requests compare byte-identical.
    #[serde(default = "default_include_runtime")]
    pub include_runtime: bool,
}

fn default_include_runtime() -> bool {
    true
}

#[derive(Debug, Serialize)]
struct DisambiguateResponse {
    ranked_labels: Vec<(Label, f64)>,
    annotations: Option<Vec<Annotation>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_s: Option<f64>,
}

fn error_body(status: StatusCode, message: String) -> Response {
    (status, Json(json!({ "error": message }))).into_response()
}

fn error_response(error: &Error) -> Response {
    let status = match error {
        Error::Timeout => StatusCode::GATEWAY_TIMEOUT,
        Error::InvalidQuery(_) | Error::EmptyQueryDocument | Error::Config(_) => {
            StatusCode::BAD_REQUEST
        }
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error_body(status, error.to_string())
}

async fn disambiguate(
    State(state): State<Arc<ServiceState>>,
    payload: std::result::Result<Json<DisambiguateRequest>, JsonRejection>,
) -> Response {
    // Any body problem is the client's fault, including the ones axum
    // classes as 415/422.
    let Json(request) = match payload {
        Ok(json) => json,
        Err(rejection) => return error_body(StatusCode::BAD_REQUEST, rejection.body_text()),
    };
    let strategy = request.strategy.unwrap_or(state.config.strategy);
    let timeout_s = match request.timeout_s {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            return error_body(
                StatusCode::BAD_REQUEST,
                format!("timeout_s must be positive, got {t}"),
            )
        }
        Some(t) => t.min(state.config.timeout_s),
        None => state.config.timeout_s,
    };

    let permit = state
        .slots
        .acquire()
        .await
        .expect("worker semaphore is never closed");
    let worker_state = Arc::clone(&state);
    let started = Instant::now();
    let outcome = tokio::task::spawn_blocking(move || {
        let deadline = Deadline::after_secs(timeout_s);
        match strategy {
            Strategy::Graph => disambiguate_document(
                &worker_state.kb,
                &worker_state.index,
                "http",
                &request.text,
                &worker_state.config.graph,
                &deadline,
            ),
            Strategy::Topic => {
                let name = request.name.clone().unwrap_or_default();
                let mut config = worker_state.config.topic;
                if let Some(seed) = request.seed {
                    config.sampler.seed = seed;
                }
                let query = Query {
                    query_id: "http".to_string(),
                    query_type: QueryType::Unknown,
                    name,
                    context_document: request.text.clone(),
                };
                topic::disambiguate_query(
                    &worker_state.kb,
                    &worker_state.index,
                    &query,
                    &config,
                    &deadline,
                )
            }
        }
    })
    .await;
    let runtime_s = started.elapsed().as_secs_f64();
    drop(permit);

    match outcome {
        Ok(Ok(result)) => Json(DisambiguateResponse {
            ranked_labels: result.ranked,
            annotations: result.annotations,
            runtime_s: request.include_runtime.then_some(runtime_s),
        })
        .into_response(),
        Ok(Err(error)) => error_response(&error),
        Err(join_error) => error_body(
            StatusCode::INTERNAL_SERVER_ERROR,
            format!("worker failed: {join_error}"),
        ),
    }
}

async fn entity(State(state): State<Arc<ServiceState>>, Path(id): Path<String>) -> Response {
    match state.kb.get(&crate::kb::EntityId::from(id.as_str())) {
        Ok(record) => Json(record).into_response(),
        Err(error) => error_body(StatusCode::NOT_FOUND, error.to_string()),
    }
}

async fn health(State(state): State<Arc<ServiceState>>) -> Response {
    Json(json!({
        "status": "ok",
        "entities": state.kb.total_entities(),
        "strategy": state.config.strategy.to_string(),
    }))
    .into_response()
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/v1/disambiguate", post(disambiguate))
        .route("/v1/entity/{id}", get(entity))
        .route("/v1/health", get(health))
        .with_state(state)
}

/// Loads the KB and index, binds the configured address, and serves until
/// interrupted.
pub async fn serve(config: ServiceConfig) -> Result<()> {
    config.validate()?;
    let (kb, report) = KnowledgeBase::load_dump(&config.kb_path)?;
    for line in report.lines() {
        eprintln!("{line}");
    }
    let index = match &config.index_path {
        Some(path) => InvertedIndex::load(path)?,
        None => InvertedIndex::build(&kb),
    };
    let listener = tokio::net::TcpListener::bind(&config.listen).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    let state = Arc::new(ServiceState::new(kb, index, config)?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
