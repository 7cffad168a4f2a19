use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;
use jdsp_core::graph::block_catalog;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::api::{self, malformed, ApiError};

/// Uploads carry base64 WAV data, well past axum's 2 MB default.
pub const MAX_BODY_BYTES: usize = 64 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct HttpResponse {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
    /// Milliseconds spent computing, reported out of band.
    pub timing_ms: Option<f64>,
}

impl HttpResponse {
    fn json<T: Serialize>(status: u16, value: &T) -> Self {
        let body = serde_json::to_vec(value).expect("response serializes");
        HttpResponse { status, content_type: "application/json", body, timing_ms: None }
    }

    fn error(e: &ApiError) -> Self {
        Self::json(e.status, e)
    }

    fn status_only(status: u16, code: &str, detail: &str) -> Self {
        Self::error(&ApiError { status, error: code.into(), detail: detail.into(), block_id: None })
    }

    pub fn json_body(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body).unwrap_or(serde_json::Value::Null)
    }
}

/// Stateless request handler; the only configuration is where the UI
/// bundle lives.
#[derive(Debug, Clone, Default)]
pub struct Service {
    pub assets: Option<PathBuf>,
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(malformed)
}

fn respond<T: Serialize>(result: Result<T, ApiError>) -> HttpResponse {
    match result {
        Ok(v) => HttpResponse::json(200, &v),
        Err(e) => HttpResponse::error(&e),
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "html" | "htm" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript; charset=utf-8",
        "css" => "text/css; charset=utf-8",
        "json" | "map" => "application/json",
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "ico" => "image/x-icon",
        "wasm" => "application/wasm",
        "txt" => "text/plain; charset=utf-8",
        _ => "application/octet-stream",
    }
}

impl Service {
    pub fn new(assets: Option<PathBuf>) -> Self {
        Service { assets }
    }

    pub fn handle(&self, method: &str, path: &str, body: &[u8]) -> HttpResponse {
        let path = path.split('?').next().unwrap_or(path);
        let started = Instant::now();
        let mut resp = match (method, path) {
            ("GET", "/api/catalog") => HttpResponse::json(200, &block_catalog()),
            ("POST", "/api/graph/validate") => respond(parse(body).and_then(|r| api::validate(&r))),
            ("POST", "/api/graph/execute") => respond(parse(body).and_then(|r| api::execute(&r))),
            ("POST", "/api/design/fir") => respond(parse(body).and_then(|r| api::design_fir(&r))),
            ("POST", "/api/design/iir") => respond(parse(body).and_then(|r| api::design_iir_tf(&r))),
            ("POST", "/api/qft/codec") => respond(parse(body).and_then(|r| api::codec(&r))),
            (
                _,
                "/api/catalog" | "/api/graph/validate" | "/api/graph/execute" | "/api/design/fir" | "/api/design/iir"
                | "/api/qft/codec",
            ) => HttpResponse::status_only(405, "MethodNotAllowed", &format!("{method} is not supported on {path}")),
            (_, p) if p.starts_with("/api/") => HttpResponse::status_only(404, "NotFound", &format!("no endpoint {p}")),
            ("GET" | "HEAD", p) => self.static_file(p),
            _ => HttpResponse::status_only(405, "MethodNotAllowed", "static assets are read-only"),
        };
        if path.starts_with("/api/") {
            resp.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
        }
        resp
    }

    fn static_file(&self, path: &str) -> HttpResponse {
        let not_found = || HttpResponse::status_only(404, "NotFound", &format!("no asset {path}"));
        let Some(root) = &self.assets else { return not_found() };
        let rel = Path::new(path.trim_start_matches('/'));
        if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
            return not_found();
        }
        let mut file = root.join(rel);
        if file.is_dir() {
            file = file.join("index.html");
        }
        match std::fs::read(&file) {
            Ok(body) => HttpResponse { status: 200, content_type: content_type(&file), body, timing_ms: None },
            Err(_) => not_found(),
        }
    }
}

async fn dispatch(State(service): State<Arc<Service>>, method: Method, uri: Uri, body: Bytes) -> Response {
    let path = uri.path().to_string();
    let handled =
        tokio::task::spawn_blocking(move || service.handle(method.as_str(), &path, &body)).await;
    let resp = match handled {
        Ok(r) => r,
        Err(e) => HttpResponse::status_only(500, "InternalError", &e.to_string()),
    };
    let status = StatusCode::from_u16(resp.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let mut out = (status, [(header::CONTENT_TYPE, resp.content_type)], resp.body).into_response();
    if let Some(ms) = resp.timing_ms {
        if let Ok(v) = HeaderValue::from_str(&format!("{ms:.3}")) {
            out.headers_mut().insert("x-timing-ms", v);
        }
    }
    out
}

pub fn router(service: Service) -> Router {
    Router::new()
        .fallback(dispatch)
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(Arc::new(service))
}

/// Binds and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, service: Service) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(service)).await
}
