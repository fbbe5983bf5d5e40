//! HTTP front end: `POST /api/analyze` streams NDJSON pipeline events,
//! `GET /healthz` answers "ok", `GET /` serves the bundled UI page.

use std::convert::Infallible;
use std::panic::AssertUnwindSafe;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::extract::{DefaultBodyLimit, FromRequest, Multipart, Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use bytes::Bytes;
use tokio::sync::mpsc;

use deckqa_core::pipeline::{run_pipeline, EventPayload, FnSink, PipelineConfig, PipelineEvent};
use deckqa_core::provider::{build_provider, Provider, ProviderConfig, ProviderError};

use crate::fetch::{fetch_pdf, file_name_from_url, parse_http_url, DEFAULT_MAX_UPLOAD};
use crate::request::{AnalyzeRequest, JsonAnalyzeBody, RawAnalyzeRequest, RequestError, Source};

pub const INDEX_HTML: &str = include_str!("../static/index.html");
pub const NDJSON: &str = "application/x-ndjson";

/// Room for multipart boundaries and the small text fields.
const MULTIPART_SLACK: usize = 1024 * 1024;
const JSON_BODY_LIMIT: usize = 64 * 1024;

pub type ProviderFactory =
    Arc<dyn Fn(&ProviderConfig) -> Result<Box<dyn Provider>, ProviderError> + Send + Sync>;

pub struct AppState {
    /// Starting point for every request; overrides are applied on a copy.
    pub base: PipelineConfig,
    pub max_upload: usize,
    pub client: reqwest::Client,
    pub provider_factory: ProviderFactory,
}

impl AppState {
    pub fn new(base: PipelineConfig) -> Self {
        Self {
            base,
            max_upload: DEFAULT_MAX_UPLOAD,
            client: reqwest::Client::new(),
            provider_factory: Arc::new(build_provider),
        }
    }

    pub fn with_provider_factory(mut self, factory: ProviderFactory) -> Self {
        self.provider_factory = factory;
        self
    }

    pub fn with_max_upload(mut self, bytes: usize) -> Self {
        self.max_upload = bytes;
        self
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let body_limit = state.max_upload.saturating_add(MULTIPART_SLACK);
    Router::new()
        .route("/", get(index))
        .route("/index.html", get(index))
        .route("/healthz", get(healthz))
        .route("/api/analyze", post(analyze))
        .layer(DefaultBodyLimit::max(body_limit))
        .with_state(state)
}

pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

async fn index() -> Html<&'static str> {
    Html(INDEX_HTML)
}

async fn healthz() -> &'static str {
    "ok"
}

impl IntoResponse for RequestError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = serde_json::json!({ "error": self.to_string(), "status": status.as_u16() });
        (status, axum::Json(body)).into_response()
    }
}

async fn analyze(State(state): State<Arc<AppState>>, request: Request) -> Response {
    match prepare(&state, request).await {
        Ok((bytes, config, provider)) => stream_pipeline(bytes, config, provider),
        Err(e) => {
            tracing::info!(status = e.status(), error = %e, "analyze request rejected");
            e.into_response()
        }
    }
}

type Prepared = (Vec<u8>, PipelineConfig, Box<dyn Provider>);

/// Everything that can fail with a plain HTTP status: parsing, source
/// resolution, configuration and provider construction.
async fn prepare(state: &AppState, request: Request) -> Result<Prepared, RequestError> {
    let parsed = read_request(state, request).await?;
    let mut config = state.base.clone();
    parsed.overrides.apply(&mut config);
    config.source.deck = parsed.deck_citation.clone();
    config.source.deck_url = parsed.deck_url.clone();

    let bytes = match parsed.source {
        Source::Upload { file_name, bytes } => {
            config.source.source_file = file_name;
            bytes
        }
        Source::Url(url) => {
            let url = parse_http_url(&url)?;
            config.source.source_file = file_name_from_url(&url);
            fetch_pdf(&state.client, &url, state.max_upload).await?
        }
    };
    config
        .validate()
        .map_err(|e| RequestError::BadRequest(e.to_string()))?;
    let provider = (state.provider_factory)(&config.provider)
        .map_err(|e| RequestError::Server(e.to_string()))?;
    Ok((bytes, config, provider))
}

async fn read_request(state: &AppState, request: Request) -> Result<AnalyzeRequest, RequestError> {
    let content_type = request
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_ascii_lowercase();
    let raw = if content_type.starts_with("multipart/form-data") {
        let multipart = Multipart::from_request(request, state)
            .await
            .map_err(|e| RequestError::BadRequest(e.body_text()))?;
        read_multipart(multipart, state.max_upload).await?
    } else if content_type.starts_with("application/json") {
        let body = to_bytes(request.into_body(), JSON_BODY_LIMIT)
            .await
            .map_err(|e| RequestError::BadRequest(format!("reading body: {e}")))?;
        let parsed: JsonAnalyzeBody = serde_json::from_slice(&body)
            .map_err(|e| RequestError::BadRequest(format!("invalid JSON body: {e}")))?;
        parsed.into()
    } else {
        return Err(RequestError::BadRequest(format!(
            "expected multipart/form-data or application/json, got {content_type:?}"
        )));
    };
    raw.finish()
}

async fn read_multipart(
    mut multipart: Multipart,
    limit: usize,
) -> Result<RawAnalyzeRequest, RequestError> {
    let mut raw = RawAnalyzeRequest::default();
    loop {
        let field = match multipart.next_field().await {
            Ok(Some(f)) => f,
            Ok(None) => break,
            Err(e) => return Err(multipart_error(e, limit)),
        };
        let name = field.name().unwrap_or("").to_string();
        match name.as_str() {
            "file" => {
                if raw.file.is_some() {
                    return Err(RequestError::BadRequest(
                        "more than one \"file\" field".into(),
                    ));
                }
                let file_name = field.file_name().unwrap_or("upload.pdf").to_string();
                let bytes = field.bytes().await.map_err(|e| multipart_error(e, limit))?;
                if bytes.len() > limit {
                    return Err(RequestError::TooLarge { limit });
                }
                // Empty file inputs are sent by browsers when nothing is chosen.
                if !bytes.is_empty() {
                    raw.file = Some((file_name, bytes.to_vec()));
                }
            }
            "url" | "deck" | "deck_citation" | "deck_url" | "overrides" => {
                let text = field.text().await.map_err(|e| multipart_error(e, limit))?;
                match name.as_str() {
                    "url" => raw.url = Some(text),
                    "deck_url" => raw.deck_url = Some(text),
                    "overrides" if !text.trim().is_empty() => {
                        raw.overrides = serde_json::from_str(&text).map_err(|e| {
                            RequestError::BadRequest(format!("invalid overrides: {e}"))
                        })?;
                    }
                    "overrides" => {}
                    _ => raw.deck_citation = Some(text),
                }
            }
            other => {
                return Err(RequestError::BadRequest(format!(
                    "unknown form field {other:?}"
                )))
            }
        }
    }
    Ok(raw)
}

fn multipart_error(e: axum::extract::multipart::MultipartError, limit: usize) -> RequestError {
    if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
        RequestError::TooLarge { limit }
    } else {
        RequestError::BadRequest(e.body_text())
    }
}

fn line(event: &PipelineEvent) -> Bytes {
    let mut text = event.to_json_line();
    text.push('\n');
    Bytes::from(text)
}

/// Runs the pipeline on a blocking thread and forwards each event as one
/// complete NDJSON line.
fn stream_pipeline(
    bytes: Vec<u8>,
    config: PipelineConfig,
    provider: Box<dyn Provider>,
) -> Response {
    let (tx, rx) = mpsc::unbounded_channel::<PipelineEvent>();
    tokio::task::spawn_blocking(move || {
        let panic_tx = tx.clone();
        let clock = config.clock.clone();
        let outcome = std::panic::catch_unwind(AssertUnwindSafe(|| {
            let sink = FnSink::new(move |e| {
                let _ = tx.send(e);
            });
            run_pipeline(&bytes, &config, provider.as_ref(), &sink)
        }));
        match outcome {
            Ok(Ok(doc)) => tracing::info!(slides = doc.slides.len(), "analysis completed"),
            Ok(Err(e)) => tracing::warn!(status = e.status(), error = %e, "analysis failed"),
            Err(_) => {
                tracing::error!("pipeline panicked");
                let _ = panic_tx.send(PipelineEvent {
                    at: clock.now(),
                    payload: EventPayload::Error {
                        message: "internal error: pipeline panicked".into(),
                        status: 500,
                    },
                });
            }
        }
    });
    let stream = futures::stream::unfold(rx, |mut rx| async move {
        rx.recv().await.map(|e| (Ok::<_, Infallible>(line(&e)), rx))
    });
    let mut response = Response::new(Body::from_stream(stream));
    let headers = response.headers_mut();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static(NDJSON));
    headers.insert(header::CACHE_CONTROL, HeaderValue::from_static("no-cache"));
    response
}
