//! HTTP service over the registry.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;

use super::api::ApiResponse;
use super::store::Registry;

type Shared = State<Arc<Registry>>;

impl IntoResponse for ApiResponse {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, [(header::CONTENT_TYPE, self.content_type)], Body::from(self.body)).into_response()
    }
}

/// Routes for every registry endpoint.
pub fn router(registry: Arc<Registry>) -> Router {
    Router::new()
        .route("/records", post(ingest))
        .route("/records/:id", get(record))
        .route("/records/:id/embed", get(embed))
        .route("/records/:id/lint", get(lint))
        .route("/records/:id/analytics/summary", get(analytics))
        .route("/search", get(search))
        .route("/facets", get(facets))
        .route("/events", post(event))
        .route("/healthz", get(health))
        .route("/sims/:id/*path", get(sim_file))
        .with_state(registry)
}

async fn ingest(State(reg): Shared, body: Bytes) -> ApiResponse {
    reg.api_ingest(&body)
}

async fn record(State(reg): Shared, Path(id): Path<String>) -> ApiResponse {
    reg.api_record(&id)
}

async fn embed(State(reg): Shared, Path(id): Path<String>, RawQuery(query): RawQuery) -> ApiResponse {
    reg.api_embed(&id, query.as_deref().unwrap_or(""))
}

async fn lint(State(reg): Shared, Path(id): Path<String>) -> ApiResponse {
    reg.api_lint(&id)
}

async fn analytics(State(reg): Shared, Path(id): Path<String>) -> ApiResponse {
    reg.api_analytics(&id)
}

async fn search(State(reg): Shared, RawQuery(query): RawQuery) -> ApiResponse {
    reg.api_search(query.as_deref().unwrap_or(""))
}

async fn facets(State(reg): Shared) -> ApiResponse {
    reg.api_facets()
}

async fn event(State(reg): Shared, body: Bytes) -> ApiResponse {
    reg.api_event(&body)
}

async fn health(State(reg): Shared) -> ApiResponse {
    reg.api_health()
}

async fn sim_file(State(reg): Shared, Path((id, path)): Path<(String, String)>) -> ApiResponse {
    reg.api_static(&id, &path)
}

/// Serves until ctrl-c.
pub async fn serve(registry: Arc<Registry>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(registry))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
