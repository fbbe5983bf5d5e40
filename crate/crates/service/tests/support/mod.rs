//! HTTP helpers shared by the service suites.
#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::routing::get;
use axum::Router;
use chrono::{TimeZone, Utc};
use http_body_util::BodyExt;
use tower::ServiceExt;

use deckqa_core::pipeline::{DeckSource, FixedClock, PipelineConfig, PipelineEvent};
use deckqa_core::provider::ProviderConfig;
use deckqa_core::synthetic::sample_lecture_pdf;
use deckqa_service::server::{router, AppState};

pub const BOUNDARY: &str = "deckqa-test-boundary";

pub fn mock_base(seed: u64) -> PipelineConfig {
    PipelineConfig {
        provider: ProviderConfig::mock(seed),
        clock: Arc::new(FixedClock(
            Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap(),
        )),
        source: DeckSource {
            source_file: "deck.pdf".into(),
            ..DeckSource::default()
        },
        ..PipelineConfig::default()
    }
}

pub fn mock_state(seed: u64) -> AppState {
    AppState::new(mock_base(seed))
}

pub enum Field<'a> {
    File {
        name: &'a str,
        file_name: &'a str,
        bytes: &'a [u8],
    },
    Text {
        name: &'a str,
        value: &'a str,
    },
}

pub fn multipart_body(fields: &[Field<'_>]) -> Vec<u8> {
    let mut out = Vec::new();
    for f in fields {
        out.extend_from_slice(format!("--{BOUNDARY}\r\n").as_bytes());
        match f {
            Field::File {
                name,
                file_name,
                bytes,
            } => {
                out.extend_from_slice(
                    format!(
                        "Content-Disposition: form-data; name=\"{name}\"; filename=\"{file_name}\"\r\nContent-Type: application/pdf\r\n\r\n"
                    )
                    .as_bytes(),
                );
                out.extend_from_slice(bytes);
            }
            Field::Text { name, value } => {
                out.extend_from_slice(
                    format!("Content-Disposition: form-data; name=\"{name}\"\r\n\r\n{value}")
                        .as_bytes(),
                );
            }
        }
        out.extend_from_slice(b"\r\n");
    }
    out.extend_from_slice(format!("--{BOUNDARY}--\r\n").as_bytes());
    out
}

pub fn multipart_request(fields: &[Field<'_>]) -> Request<Body> {
    Request::post("/api/analyze")
        .header(
            header::CONTENT_TYPE,
            format!("multipart/form-data; boundary={BOUNDARY}"),
        )
        .body(Body::from(multipart_body(fields)))
        .unwrap()
}

pub fn upload(bytes: &[u8], file_name: &str) -> Request<Body> {
    multipart_request(&[Field::File {
        name: "file",
        file_name,
        bytes,
    }])
}

pub fn json_request(body: serde_json::Value) -> Request<Body> {
    Request::post("/api/analyze")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap()
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body).unwrap()
    }

    /// Every line must parse on its own; the body must end with a newline.
    pub fn events(&self) -> Vec<PipelineEvent> {
        let text = self.text();
        assert!(text.ends_with('\n'), "stream must end on a line boundary");
        text.lines()
            .map(|l| {
                serde_json::from_str(l).unwrap_or_else(|e| panic!("unparseable line {l:?}: {e}"))
            })
            .collect()
    }
}

pub async fn send(state: AppState, request: Request<Body>) -> Reply {
    send_shared(Arc::new(state), request).await
}

pub async fn send_shared(state: Arc<AppState>, request: Request<Body>) -> Reply {
    let response = router(state).oneshot(request).await.unwrap();
    let status = response.status();
    let content_type = response
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let body = response
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    Reply {
        status,
        content_type,
        body,
    }
}

/// Local origin for URL-source tests: `/lecture.pdf`, `/page.html`, and
/// 404 for everything else.
pub async fn spawn_origin() -> SocketAddr {
    let pdf = sample_lecture_pdf();
    let app = Router::new()
        .route(
            "/lecture.pdf",
            get(move || {
                let pdf = pdf.clone();
                async move { ([(header::CONTENT_TYPE, "application/octet-stream")], pdf) }
            }),
        )
        .route(
            "/page.html",
            get(|| async { ([(header::CONTENT_TYPE, "text/html")], "<html></html>") }),
        );
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    addr
}
