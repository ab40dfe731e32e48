//! Axum routes over a [`Workspace`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tokio::net::TcpListener;

use crate::api::*;
use crate::error::WsError;
use crate::workspace::{plain_rows, EnrichRequest, Exec, Upload, Workspace};

type Ws = State<Arc<Workspace>>;

/// Upload limit for POST /enrich.
pub const MAX_UPLOAD_BYTES: usize = 1 << 30;

pub struct HttpError(WsError);

impl From<WsError> for HttpError {
    fn from(e: WsError) -> Self {
        HttpError(e)
    }
}

impl IntoResponse for HttpError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.0.to_api())).into_response()
    }
}

type ApiResult<T> = Result<T, HttpError>;

fn bad_body(e: JsonRejection) -> HttpError {
    HttpError(WsError::bad("bad_request", e.body_text()))
}

/// Runs blocking workspace code off the async executor.
async fn blocking<T: Send + 'static>(
    ws: Arc<Workspace>,
    f: impl FnOnce(&Arc<Workspace>) -> Result<T, WsError> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(move || f(&ws)).await.map_err(|e| HttpError(WsError::internal(e)))?.map_err(HttpError)
}

async fn enrich(State(ws): Ws, mut form: Multipart) -> ApiResult<Json<crate::jobs::JobRecord>> {
    let bad = |m: String| HttpError(WsError::bad("bad_upload", m));
    let mut req = EnrichRequest::default();
    let mut fields = 0;
    loop {
        let field = match form.next_field().await {
            Ok(Some(f)) => f,
            Ok(None) => break,
            // An empty multipart body has no boundary line; it carries no files.
            Err(_) if fields == 0 => break,
            Err(e) => return Err(bad(e.body_text())),
        };
        fields += 1;
        let name = field.name().unwrap_or_default().to_string();
        let file = field.file_name().map(str::to_string);
        let bytes = field.bytes().await.map_err(|e| bad(e.body_text()))?;
        let text = || String::from_utf8(bytes.to_vec()).map_err(|_| bad(format!("field '{name}' is not UTF-8")));
        let json_err = |e: serde_json::Error| bad(format!("field '{name}': {e}"));
        match name.as_str() {
            "vcf" | "cadd" | "metadata" => {
                let upload = Upload { name: file.unwrap_or_else(|| name.clone()), bytes: bytes.to_vec() };
                match name.as_str() {
                    "vcf" => req.vcf.push(upload),
                    "cadd" => req.cadd.push(upload),
                    _ => req.metadata.push(upload),
                }
            }
            "accession_pattern" => req.options.accession_pattern = Some(text()?),
            "accession_map" => req.options.accession_map = serde_json::from_str(&text()?).map_err(json_err)?,
            "metadata_options" => req.options.metadata = serde_json::from_str(&text()?).map_err(json_err)?,
            "vcf_options" => req.options.vcf = serde_json::from_str(&text()?).map_err(json_err)?,
            "options" => req.options = serde_json::from_str(&text()?).map_err(json_err)?,
            other => return Err(bad(format!("unexpected field '{other}'"))),
        }
    }
    let job = blocking(ws, move |ws| ws.submit_enrich(req, Exec::Background)).await?;
    Ok(Json(job))
}

async fn job(State(ws): Ws, Path(id): Path<String>) -> ApiResult<Json<crate::jobs::JobRecord>> {
    Ok(Json(ws.job(&id)?))
}

async fn jobs(State(ws): Ws) -> Json<Vec<crate::jobs::JobRecord>> {
    Json(ws.jobs())
}

async fn accessions(
    State(ws): Ws,
    q: Result<Query<AccessionQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<Vec<String>>> {
    let Query(q) = q.map_err(|e| HttpError(WsError::bad("bad_request", e.body_text())))?;
    Ok(Json(blocking(ws, move |ws| ws.accessions(q)).await?))
}

async fn features() -> Json<Vec<String>> {
    Json(Workspace::feature_names())
}

async fn fetch(
    State(ws): Ws,
    body: Result<Json<FetchRequest>, JsonRejection>,
) -> ApiResult<Json<crate::jobs::JobRecord>> {
    let Json(req) = body.map_err(bad_body)?;
    Ok(Json(blocking(ws, move |ws| ws.submit_fetch(req, Exec::Background)).await?))
}

#[derive(Deserialize)]
struct TableQuery {
    limit: Option<usize>,
}

async fn table(State(ws): Ws, Path(id): Path<String>, Query(q): Query<TableQuery>) -> ApiResult<Json<TableView>> {
    let view = blocking(ws, move |ws| {
        let info = ws.table_info(&id)?;
        let t = ws.table(&id)?;
        Ok(TableView { info, preview: t.preview(q.limit.unwrap_or(100)) })
    })
    .await?;
    Ok(Json(view))
}

async fn table_csv(State(ws): Ws, Path(id): Path<String>) -> ApiResult<Response> {
    let csv = blocking(ws, move |ws| Ok(ws.table(&id)?.to_csv_string())).await?;
    Ok(([(header::CONTENT_TYPE, "text/csv")], csv).into_response())
}

async fn query(State(ws): Ws, body: String) -> ApiResult<Json<serde_json::Value>> {
    let t = blocking(ws, move |ws| ws.query(&body)).await?;
    Ok(Json(serde_json::json!({ "columns": t.columns, "rows": plain_rows(&t) })))
}

async fn create_graph(
    State(ws): Ws,
    body: Result<Json<GraphRequest>, JsonRejection>,
) -> ApiResult<Json<crate::jobs::JobRecord>> {
    let Json(req) = body.map_err(bad_body)?;
    Ok(Json(blocking(ws, move |ws| ws.submit_build(req)).await?))
}

async fn graphs(State(ws): Ws) -> ApiResult<Json<Vec<GraphInfo>>> {
    Ok(Json(blocking(ws, |ws| ws.graphs()).await?))
}

async fn graph(State(ws): Ws, Path(id): Path<String>) -> ApiResult<Json<GraphInfo>> {
    Ok(Json(blocking(ws, move |ws| ws.graph_info(&id)).await?))
}

async fn graph_download(State(ws): Ws, Path(id): Path<String>) -> ApiResult<Response> {
    let bytes = blocking(ws, move |ws| ws.graph_bytes(&id)).await?;
    Ok(([(header::CONTENT_TYPE, "application/octet-stream")], Bytes::from(bytes)).into_response())
}

async fn start_train(
    State(ws): Ws,
    body: Result<Json<TrainRequest>, JsonRejection>,
) -> ApiResult<Json<crate::jobs::JobRecord>> {
    let Json(req) = body.map_err(bad_body)?;
    Ok(Json(blocking(ws, move |ws| ws.submit_train(req, Exec::Background)).await?))
}

#[derive(Deserialize)]
struct Offset {
    offset: Option<usize>,
}

async fn telemetry(State(ws): Ws, Path(id): Path<String>, Query(q): Query<Offset>) -> ApiResult<Json<TelemetryPage>> {
    Ok(Json(ws.telemetry(&id, q.offset.unwrap_or(0))?))
}

async fn report(State(ws): Ws, Path(id): Path<String>) -> ApiResult<Json<TrainResult>> {
    Ok(Json(ws.report(&id)?))
}

async fn inference(State(ws): Ws, Path(id): Path<String>) -> ApiResult<Json<variantkg_core::gnn::Metrics>> {
    Ok(Json(blocking(ws, move |ws| ws.infer(&id)).await?))
}

async fn health(State(ws): Ws) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok", "store": ws.stats() }))
}

async fn not_found() -> HttpError {
    HttpError(WsError::NotFound { what: "route", id: String::new() })
}

pub fn router(ws: Arc<Workspace>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/enrich", post(enrich))
        .route("/jobs", get(jobs))
        .route("/jobs/{id}", get(job))
        .route("/accessions", get(accessions))
        .route("/features", get(features))
        .route("/fetch", post(fetch))
        .route("/tables/{id}", get(table))
        .route("/tables/{id}/csv", get(table_csv))
        .route("/query", post(query))
        .route("/graphs", get(graphs).post(create_graph))
        .route("/graphs/{id}", get(graph))
        .route("/graphs/{id}/download", get(graph_download))
        .route("/train", post(start_train))
        .route("/train/{job}/telemetry", get(telemetry))
        .route("/train/{job}/report", get(report))
        .route("/inference/{job}", get(inference))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(ws)
}

/// Serves until the process is interrupted.
pub async fn serve(listener: TcpListener, ws: Arc<Workspace>) -> std::io::Result<()> {
    axum::serve(listener, router(ws))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Starts the service on a background thread with its own runtime and
/// returns the bound address.
pub fn spawn(addr: SocketAddr, ws: Arc<Workspace>) -> std::io::Result<SocketAddr> {
    let std_listener = std::net::TcpListener::bind(addr)?;
    std_listener.set_nonblocking(true)?;
    let local = std_listener.local_addr()?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    std::thread::spawn(move || {
        rt.block_on(async move {
            let listener = TcpListener::from_std(std_listener).expect("listener");
            let _ = axum::serve(listener, router(ws)).await;
        })
    });
    Ok(local)
}
