//! HTTP API over the solvers.
//!
//! Every endpoint is a pure function of its request body: no state survives
//! between requests, and annealing requests must carry their seed. Indices on
//! the wire are 1-based.

use std::future::Future;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use collegeapp::heterogeneous::SaParams;
use collegeapp::{
    path_error, solve, solve_frontier, what_if, Algorithm, Error, FrontierView, Market,
    RefusalReason, ReportView, SolveOptions, WhatIfView,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub const DEFAULT_BODY_LIMIT: usize = 1 << 20;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Largest accepted request body in bytes.
    pub body_limit: usize,
    /// Wall-clock budget per solver invocation.
    pub timeout: Duration,
    /// Origins allowed by CORS; empty allows any.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            body_limit: DEFAULT_BODY_LIMIT,
            timeout: DEFAULT_TIMEOUT,
            cors_origins: Vec::new(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    pub error: ErrorBody,
}

/// An error response: status plus the JSON envelope.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(
        status: StatusCode,
        code: &str,
        message: impl Into<String>,
        path: Option<String>,
    ) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                path,
            },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid { path, message } => {
                ApiError::new(StatusCode::BAD_REQUEST, "invalid", message, path)
            }
            Error::Refused { reason, message } => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                reason.code(),
                message,
                None,
            ),
        }
    }
}

impl From<BytesRejection> for ApiError {
    fn from(r: BytesRejection) -> Self {
        let status = r.status();
        let code = if status == StatusCode::PAYLOAD_TOO_LARGE {
            "payload_too_large"
        } else {
            "bad_body"
        };
        ApiError::new(status, code, r.body_text(), None)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorEnvelope { error: self.body })).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, Error> {
    let mut de = serde_json::Deserializer::from_slice(body);
    let value = serde_path_to_error::deserialize(&mut de).map_err(path_error)?;
    de.end().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(value)
}

/// Re-roots validation paths under `prefix`.
fn nest(prefix: &str, e: Error) -> Error {
    match e {
        Error::Invalid { path, message } => Error::Invalid {
            path: Some(match path {
                Some(p) => format!("{prefix}.{p}"),
                None => prefix.to_string(),
            }),
            message,
        },
        other => other,
    }
}

/// Annealing parameters; every field but the seed has a default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaRequest {
    pub temperature: Option<f64>,
    pub reduction: Option<f64>,
    pub iterations: Option<u64>,
    pub seed: Option<u64>,
}

/// Body of `/api/solve`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    pub market: Market,
    #[serde(default)]
    pub algorithm: Algorithm,
    pub epsilon: Option<f64>,
    /// Replaces the market's budget.
    pub h: Option<f64>,
    #[serde(default)]
    pub sa: SaRequest,
}

/// Body of `/api/whatif`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    pub market: Market,
    #[serde(default)]
    pub locked_in: Vec<usize>,
    #[serde(default)]
    pub locked_out: Vec<usize>,
    #[serde(default)]
    pub algorithm: Algorithm,
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub sa: SaRequest,
}

fn options(
    algorithm: Algorithm,
    epsilon: Option<f64>,
    sa: &SaRequest,
) -> Result<SolveOptions, Error> {
    let defaults = SolveOptions::default();
    if algorithm == Algorithm::Sa && sa.seed.is_none() {
        return Err(Error::invalid_at(
            "sa.seed",
            "annealing requests must carry an explicit seed",
        ));
    }
    Ok(SolveOptions {
        algorithm,
        epsilon: epsilon.unwrap_or(defaults.epsilon),
        sa: SaParams {
            temperature: sa.temperature.unwrap_or(defaults.sa.temperature),
            reduction: sa.reduction.unwrap_or(defaults.sa.reduction),
            iterations: sa.iterations.unwrap_or(defaults.sa.iterations),
            seed: sa.seed.unwrap_or(defaults.sa.seed),
        },
    })
}

fn zero_based(ids: &[usize], field: &str) -> Result<Vec<usize>, Error> {
    ids.iter()
        .enumerate()
        .map(|(k, &i)| {
            i.checked_sub(1).ok_or_else(|| {
                Error::invalid_at(format!("{field}[{k}]"), "school indices start at 1")
            })
        })
        .collect()
}

fn solve_body(body: &[u8]) -> Result<ReportView, Error> {
    let mut req: SolveRequest = parse(body)?;
    if let Some(h) = req.h {
        req.market.budget = h;
    }
    req.market.validate().map_err(|e| nest("market", e))?;
    let opts = options(req.algorithm, req.epsilon, &req.sa)?;
    let solution = solve(&req.market, &opts)?;
    ReportView::from_solution(&req.market, &solution, false)
}

fn frontier_body(body: &[u8]) -> Result<FrontierView, Error> {
    let market: Market = parse(body)?;
    market.validate()?;
    let (canonical, front) = solve_frontier(&market)?;
    Ok(FrontierView::new(&market, &canonical, &front))
}

fn whatif_body(body: &[u8]) -> Result<WhatIfView, Error> {
    let req: WhatIfRequest = parse(body)?;
    req.market.validate().map_err(|e| nest("market", e))?;
    let opts = options(req.algorithm, req.epsilon, &req.sa)?;
    let locked_in = zero_based(&req.locked_in, "locked_in")?;
    let locked_out = zero_based(&req.locked_out, "locked_out")?;
    let result = what_if(&req.market, &locked_in, &locked_out, &opts)?;
    WhatIfView::new(&req.market, &result, &locked_in, &locked_out, false)
}

/// Runs `work` on the blocking pool, giving up after the configured budget.
/// An abandoned solve keeps its thread until it finishes; its result is dropped.
async fn run_limited<T: Send + 'static>(
    config: &ServiceConfig,
    body: Result<Bytes, BytesRejection>,
    work: fn(&[u8]) -> Result<T, Error>,
) -> ApiResult<T> {
    let body = body?;
    let task = tokio::task::spawn_blocking(move || work(&body));
    match tokio::time::timeout(config.timeout, task).await {
        Ok(Ok(result)) => Ok(Json(result?)),
        Ok(Err(join)) => Err(ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            join.to_string(),
            None,
        )),
        Err(_) => Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            RefusalReason::TimeBudget.code(),
            format!("solver exceeded the {:?} time budget", config.timeout),
            None,
        )),
    }
}

async fn post_solve(
    State(cfg): State<ServiceConfig>,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult<ReportView> {
    run_limited(&cfg, body, solve_body).await
}

async fn post_frontier(
    State(cfg): State<ServiceConfig>,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult<FrontierView> {
    run_limited(&cfg, body, frontier_body).await
}

async fn post_whatif(
    State(cfg): State<ServiceConfig>,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult<WhatIfView> {
    run_limited(&cfg, body, whatif_body).await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

fn cors(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origins.is_empty() {
        return layer.allow_origin(Any);
    }
    let list: Vec<HeaderValue> = origins.iter().filter_map(|o| o.parse().ok()).collect();
    layer.allow_origin(AllowOrigin::list(list))
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/solve", post(post_solve))
        .route("/api/frontier", post(post_frontier))
        .route("/api/whatif", post(post_whatif))
        .layer(DefaultBodyLimit::max(config.body_limit))
        .layer(cors(&config.cors_origins))
        .with_state(config)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(config))
        .with_graceful_shutdown(shutdown)
        .await
}
