//! HTTP routes over a [`Session`].

use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use depthedge::io;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::edit::{EdgeEdit, Pixel};
use crate::error::AnnotateError;
use crate::session::{ItemSnapshot, Session, Status};

pub const DEFAULT_PORT: u16 = 8707;

#[derive(Debug, Clone, PartialEq)]
pub struct ServerConfig {
    pub port: u16,
    /// Directory of built UI assets served at `/`, if any.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            port: DEFAULT_PORT,
            ui_dir: None,
        }
    }
}

impl ServerConfig {
    /// Browser origins allowed to call the API: the UI served by this
    /// process on localhost.
    pub fn allowed_origins(&self) -> Vec<HeaderValue> {
        ["localhost", "127.0.0.1"]
            .iter()
            .map(|h| HeaderValue::from_str(&format!("http://{h}:{}", self.port)).expect("ascii origin"))
            .collect()
    }
}

type AppState = Arc<Session>;

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

impl IntoResponse for AnnotateError {
    fn into_response(self) -> Response {
        let status = match &self {
            AnnotateError::UnknownItem(_) | AnnotateError::NoDepth(_) => StatusCode::NOT_FOUND,
            AnnotateError::InvalidEdit(_) | AnnotateError::InvalidProbe(_) => StatusCode::BAD_REQUEST,
            AnnotateError::Conflict(_) | AnnotateError::NothingToExport => StatusCode::CONFLICT,
            AnnotateError::Manifest(_) | AnnotateError::Journal { .. } | AnnotateError::Core(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        (status, Json(ErrorBody { error: self.to_string() })).into_response()
    }
}

type ApiResult<T> = Result<T, AnnotateError>;

/// Edge map as sent to clients.
#[derive(Debug, Serialize)]
struct EdgesBody {
    id: String,
    status: Status,
    seq: u64,
    height: usize,
    width: usize,
    edges: Vec<Pixel>,
}

fn edges_body(id: &str, snap: &ItemSnapshot) -> EdgesBody {
    EdgesBody {
        id: id.to_string(),
        status: snap.status,
        seq: snap.seq,
        height: snap.edges.height(),
        width: snap.edges.width(),
        edges: snap.edges.pixels(),
    }
}

/// Runs a blocking session call (journal fsync, PNG encoding) off the
/// async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| std::panic::resume_unwind(e.into_panic()))
}

async fn list_items(State(s): State<AppState>) -> impl IntoResponse {
    Json(s.summaries())
}

#[derive(Serialize)]
struct ItemBody {
    #[serde(flatten)]
    summary: crate::session::ItemSummary,
    image_url: String,
    depth_url: Option<String>,
    edges_url: String,
    edges: Vec<Pixel>,
}

async fn get_item(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<ItemBody>> {
    let summary = s.summary(&id)?;
    let snap = s.snapshot(&id)?;
    Ok(Json(ItemBody {
        image_url: format!("/items/{id}/image"),
        depth_url: summary.has_depth.then(|| format!("/items/{id}/depth")),
        edges_url: format!("/items/{id}/edges"),
        edges: snap.edges.pixels(),
        summary,
    }))
}

fn bytes_response(content_type: &'static str, bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, content_type)], bytes).into_response()
}

async fn get_image(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let path = s.rgb_path(&id)?;
    let content_type = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("jpg" | "jpeg") => "image/jpeg",
        _ => "image/png",
    };
    let bytes = blocking(move || Ok(io::read_file(&path)?)).await?;
    Ok(bytes_response(content_type, bytes))
}

async fn get_depth(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let bytes = io::write_pfm_depth(s.depth(&id)?);
    Ok(bytes_response("application/x-pfm", bytes))
}

async fn get_edges(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let snap = s.snapshot(&id)?;
    let bytes = io::write_edges_png8(&snap.edges).map_err(AnnotateError::from)?;
    Ok(bytes_response("image/png", bytes))
}

async fn post_edit(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Json(edit): Json<EdgeEdit>,
) -> ApiResult<Json<EdgesBody>> {
    let key = id.clone();
    let snap = blocking(move || s.apply_edit(&key, edit)).await?;
    Ok(Json(edges_body(&id, &snap)))
}

#[derive(Deserialize)]
struct StatusRequest {
    status: Status,
}

async fn post_status(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<StatusRequest>,
) -> ApiResult<Json<crate::session::ItemSummary>> {
    let key = id.clone();
    let state = Arc::clone(&s);
    blocking(move || state.set_status(&key, req.status)).await?;
    Ok(Json(s.summary(&id)?))
}

#[derive(Deserialize)]
struct ProbeRequest {
    p1: Pixel,
    p2: Pixel,
}

async fn post_probe(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<ProbeRequest>,
) -> ApiResult<Json<crate::session::ProbeResult>> {
    Ok(Json(s.depth_probe(&id, req.p1, req.p2)?))
}

#[derive(Deserialize, Default)]
struct ExportRequest {
    /// Output directory, relative to the dataset root unless absolute.
    #[serde(default)]
    out_dir: Option<PathBuf>,
}

async fn post_export(
    State(s): State<AppState>,
    body: Option<Json<ExportRequest>>,
) -> ApiResult<Json<crate::session::ExportSummary>> {
    let req = body.map(|Json(r)| r).unwrap_or_default();
    let out = s.root().join(req.out_dir.unwrap_or_else(|| PathBuf::from("export")));
    Ok(Json(blocking(move || s.export(&out)).await?))
}

/// API routes with CORS limited to `allowed_origins`.
pub fn router(session: Arc<Session>, allowed_origins: Vec<HeaderValue>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(allowed_origins)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/items", get(list_items))
        .route("/items/{id}", get(get_item))
        .route("/items/{id}/image", get(get_image))
        .route("/items/{id}/depth", get(get_depth))
        .route("/items/{id}/edges", get(get_edges))
        .route("/items/{id}/edits", post(post_edit))
        .route("/items/{id}/status", post(post_status))
        .route("/items/{id}/probe", post(post_probe))
        .route("/export", post(post_export))
        .layer(cors)
        .with_state(session)
}

/// Serves the API (and the UI assets, when configured) on
/// `127.0.0.1:port` until the process ends.
pub async fn serve(session: Arc<Session>, cfg: ServerConfig) -> std::io::Result<()> {
    let mut app = router(session, cfg.allowed_origins());
    if let Some(dir) = &cfg.ui_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, cfg.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app).await
}
