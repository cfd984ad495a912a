//! Read-only HTTP API over an opened index.
//!
//! Scores come from the same [`score_pipeline`] and canonical encoder the
//! CLI uses, so both emit identical bytes for identical parameters.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::error::Error;
use crate::geo::{find_holes, holes_geojson, DEFAULT_MIN_RUN_CELLS};
use crate::ingest::Index;
use crate::qoi::{filter, score_pipeline, window_from_bounds, FilterSpec, ScoreParams, Weights};
use crate::spatial::{Metric, DEFAULT_PROJECTIONS, DEFAULT_SEED};

const PLACEHOLDER_PAGE: &str = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>svqoi</title></head>\n\
<body><h1>svqoi</h1><p>No dashboard assets configured. The API lives under <code>/api/</code>.</p></body></html>\n";

/// Every score query parameter, as the cache key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScoreQuery {
    pub weights: Weights,
    pub metric: Metric,
    pub from: Option<i64>,
    pub to: Option<i64>,
    pub seed: u64,
    pub projections: usize,
}

impl Default for ScoreQuery {
    fn default() -> Self {
        ScoreQuery {
            weights: Weights::default(),
            metric: Metric::Jsd,
            from: None,
            to: None,
            seed: DEFAULT_SEED,
            projections: DEFAULT_PROJECTIONS,
        }
    }
}

impl ScoreQuery {
    /// Runs the scoring pipeline and returns the canonical JSON.
    pub fn run(&self, index: &Index) -> crate::Result<String> {
        let mut params = ScoreParams {
            weights: self.weights,
            window: window_from_bounds(index, self.from, self.to)?,
            ..ScoreParams::default()
        };
        params.quality.metric = self.metric;
        params.quality.spatial.seed = self.seed;
        params.quality.spatial.projections = self.projections;
        score_pipeline(index, &params)?.to_json()
    }

    fn from_params(q: &HashMap<String, String>) -> Result<Self, ApiError> {
        let mut out = ScoreQuery::default();
        if let Some(w) = q.get("weights") {
            out.weights = w.parse().map_err(ApiError::from)?;
        }
        if let Some(m) = q.get("metric") {
            out.metric = m.parse().map_err(ApiError::from)?;
        }
        out.from = parse_opt(q, "from")?;
        out.to = parse_opt(q, "to")?;
        out.seed = parse_opt(q, "seed")?.unwrap_or(DEFAULT_SEED);
        out.projections = parse_opt(q, "projections")?.unwrap_or(DEFAULT_PROJECTIONS);
        if out.projections == 0 {
            return Err(ApiError::bad_request("projections must be positive"));
        }
        Ok(out)
    }
}

fn parse_opt<T: std::str::FromStr>(q: &HashMap<String, String>, key: &str) -> Result<Option<T>, ApiError> {
    match q.get(key).map(|s| s.as_str()) {
        None | Some("") => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| ApiError::bad_request(format!("invalid {key}: {v:?}"))),
    }
}

/// A non-2xx response with body `{"error": message}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::WeightOutOfRange(_) | Error::Invalid(_) | Error::Json(_) => StatusCode::BAD_REQUEST,
            Error::UnknownRegion(_) => StatusCode::NOT_FOUND,
            Error::EmptyWindow | Error::SizeLimit { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError {
            status,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

struct AppState {
    index: Arc<Index>,
    scores: Mutex<HashMap<ScoreQuery, Arc<String>>>,
}

/// Router over `index`. Static files come from `static_dir` when given,
/// otherwise `/` serves a placeholder page.
pub fn router(index: Arc<Index>, static_dir: Option<PathBuf>) -> Router {
    let state = Arc::new(AppState {
        index,
        scores: Mutex::new(HashMap::new()),
    });
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/regions", get(regions))
        .route("/api/scores", get(scores))
        .route("/api/holes/{region}", get(holes))
        .route("/api/distribution/{region}", get(distribution))
        .route("/api/filter", post(filter_stats))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_PAGE) })).fallback(not_found),
    };
    app.layer(CorsLayer::permissive())
}

/// Serves `router(index, static_dir)` on `0.0.0.0:port` until the process ends.
pub async fn serve(index: Arc<Index>, static_dir: Option<PathBuf>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(index, static_dir)).await
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        message: "not found".into(),
    }
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn regions(State(state): State<Arc<AppState>>) -> Json<Value> {
    let list: Vec<Value> = state
        .index
        .regions
        .iter()
        .map(|r| {
            json!({
                "region_id": r.region_id(),
                "cell_count": r.grid.len(),
                "record_count": r.records.len(),
                "day_range": r.day_range().map(|(a, b)| [a, b]),
            })
        })
        .collect();
    Json(Value::Array(list))
}

async fn scores(
    State(state): State<Arc<AppState>>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let key = ScoreQuery::from_params(&q)?;
    let cached = state.scores.lock().expect("score cache lock").get(&key).cloned();
    let body = match cached {
        Some(body) => body,
        None => {
            let index = state.index.clone();
            let k = key.clone();
            let body = tokio::task::spawn_blocking(move || k.run(&index))
                .await
                .map_err(|e| ApiError {
                    status: StatusCode::INTERNAL_SERVER_ERROR,
                    message: e.to_string(),
                })??;
            let body = Arc::new(body);
            state.scores.lock().expect("score cache lock").insert(key, body.clone());
            body
        }
    };
    Ok(([(header::CONTENT_TYPE, "application/json")], body.as_str().to_owned()).into_response())
}

async fn holes(
    State(state): State<Arc<AppState>>,
    Path(region): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let r = state.index.region(&region).ok_or(Error::UnknownRegion(region))?;
    let min_run: usize = parse_opt(&q, "min_run")?.unwrap_or(DEFAULT_MIN_RUN_CELLS);
    if min_run == 0 {
        return Err(ApiError::bad_request("min_run must be at least 1"));
    }
    let counts = r.cell_counts(|_| true);
    Ok(Json(holes_geojson(&r.grid, &find_holes(&r.grid, &counts, min_run))))
}

async fn distribution(
    State(state): State<Arc<AppState>>,
    Path(region): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let r = state.index.region(&region).ok_or(Error::UnknownRegion(region))?;
    let day: Option<i64> = parse_opt(&q, "day")?;
    let counts = r.cell_counts(|rec| day.is_none_or(|d| rec.day == d));
    let features: Vec<Value> = r
        .grid
        .cells
        .iter()
        .zip(&counts)
        .map(|(cell, &count)| {
            json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": [cell.centroid.lon, cell.centroid.lat] },
                "properties": {
                    "region_id": r.region_id(),
                    "cell_id": cell.cell_id,
                    "segment_index": cell.segment_index,
                    "count": count,
                },
            })
        })
        .collect();
    Ok(Json(json!({ "type": "FeatureCollection", "features": features })))
}

async fn filter_stats(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let spec: FilterSpec = if body.iter().all(u8::is_ascii_whitespace) {
        FilterSpec::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("malformed filter spec: {e}")))?
    };
    let index = state.index.clone();
    let stats = tokio::task::spawn_blocking(move || filter(&index, &spec).map(|f| f.stats()))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: e.to_string(),
        })??;
    Ok(Json(serde_json::to_value(stats).map_err(Error::from)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use axum::body::Body;
    use axum::http::Request;
    use http_body_util::BodyExt;
    use tower::ServiceExt;

    async fn get_body(app: Router, uri: &str) -> (StatusCode, String) {
        let res = app.oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
        let status = res.status();
        let bytes = res.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    fn empty() -> Router {
        router(Arc::new(Index::empty(Default::default())), None)
    }

    #[tokio::test]
    async fn health_and_empty_regions() {
        assert_eq!(get_body(empty(), "/api/health").await, (StatusCode::OK, r#"{"status":"ok"}"#.into()));
        assert_eq!(get_body(empty(), "/api/regions").await, (StatusCode::OK, "[]".into()));
    }

    #[tokio::test]
    async fn bad_weights_are_400_with_error_body() {
        let (status, body) = get_body(empty(), "/api/scores?weights=1,6,1").await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        let v: Value = serde_json::from_str(&body).unwrap();
        assert!(v["error"].as_str().unwrap().contains("weight out of range 0..5"));
    }

    #[tokio::test]
    async fn empty_index_scores_are_422() {
        assert_eq!(get_body(empty(), "/api/scores").await.0, StatusCode::UNPROCESSABLE_ENTITY);
    }

    #[tokio::test]
    async fn unknown_region_is_404() {
        assert_eq!(get_body(empty(), "/api/holes/ZZZ").await.0, StatusCode::NOT_FOUND);
        assert_eq!(get_body(empty(), "/api/distribution/ZZZ").await.0, StatusCode::NOT_FOUND);
    }

    #[tokio::test]
    async fn root_serves_placeholder() {
        let (status, body) = get_body(empty(), "/").await;
        assert_eq!(status, StatusCode::OK);
        assert!(body.contains("/api/"));
    }
}
