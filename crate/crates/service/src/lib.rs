//! Local HTTP API: gate catalog, circuit simulation, and streamed VQE runs.
//!
//! Handlers are stateless; every request owns its simulation. CPU-bound work
//! runs on the blocking pool so a long VQE stream never stalls `/simulate`.

mod error;
mod openapi;
mod simulate;
mod vqe;

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::sync::atomic::AtomicUsize;
use std::sync::{Arc, OnceLock};

use axum::http::header::{CACHE_CONTROL, CONTENT_TYPE, ETAG, IF_NONE_MATCH};
use axum::http::{HeaderMap, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use sha2::{Digest, Sha256};
use tower_http::cors::{Any, CorsLayer};

pub use error::ApiError;
pub use simulate::SimulationRequest;
pub use vqe::FactorRequest;

pub const DEFAULT_BIND: IpAddr = IpAddr::V4(Ipv4Addr::LOCALHOST);
pub const DEFAULT_PORT: u16 = 8765;

#[derive(Clone, Default)]
pub struct AppState {
    /// VQE workers currently running.
    pub active_vqe_runs: Arc<AtomicUsize>,
}

struct Catalog {
    body: String,
    etag: String,
}

fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let body = serde_json::to_string(&qsim_core::gates::catalog()).expect("catalog serializes");
        let digest: String = Sha256::digest(body.as_bytes())
            .iter()
            .take(16)
            .map(|b| format!("{b:02x}"))
            .collect();
        Catalog {
            body,
            etag: format!("\"{digest}\""),
        }
    })
}

async fn gates(headers: HeaderMap) -> Response {
    let cat = catalog();
    let matches = headers
        .get(IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| {
            v.split(',')
                .any(|t| t.trim() == cat.etag || t.trim() == "*")
        });
    let cache = [
        (ETAG, cat.etag.clone()),
        (CACHE_CONTROL, "public, max-age=3600".to_string()),
    ];
    if matches {
        return (StatusCode::NOT_MODIFIED, cache).into_response();
    }
    (
        cache,
        [(CONTENT_TYPE, "application/json")],
        cat.body.clone(),
    )
        .into_response()
}

async fn spec() -> Json<serde_json::Value> {
    Json(openapi::document())
}

pub fn router() -> Router {
    router_with_state(AppState::default())
}

pub fn router_with_state(state: AppState) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([CONTENT_TYPE, IF_NONE_MATCH])
        .expose_headers([ETAG]);
    Router::new()
        .route("/api/v1/gates", get(gates))
        .route("/api/v1/simulate", post(simulate::handler))
        .route("/api/v1/vqe/factor", post(vqe::handler))
        .route("/api/v1/spec", get(spec))
        .with_state(state)
        .layer(cors)
}

/// Serves the API until the process is stopped.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}
