//! Chat-completions HTTP backend.
//!
//! Sends the system prompt followed by one user message whose content parts
//! keep the request's text/image order. Images travel as base64 PNG data
//! URLs.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde_json::{json, Value};

use super::request::{Part, ProviderRequest};
use super::{Provider, ProviderConfig, ProviderError, TransportError};

pub const API_KEY_ENV: &str = "LLM_API_KEY";
pub const ENDPOINT_ENV: &str = "LLM_ENDPOINT";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";

pub struct LiveProvider {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
    model: String,
    temperature: f64,
}

impl std::fmt::Debug for LiveProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LiveProvider")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .finish_non_exhaustive()
    }
}

impl LiveProvider {
    pub fn new(
        config: &ProviderConfig,
        endpoint: String,
        api_key: String,
    ) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        Ok(Self {
            client,
            endpoint,
            api_key,
            model: config.model_name.clone(),
            temperature: config.temperature,
        })
    }

    /// Reads the key from `LLM_API_KEY` and the endpoint from the config or
    /// `LLM_ENDPOINT`.
    pub fn from_env(config: &ProviderConfig) -> Result<Self, ProviderError> {
        let api_key = std::env::var(API_KEY_ENV)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| {
                ProviderError::Config(format!("live mode needs {API_KEY_ENV} to be set"))
            })?;
        let endpoint = config
            .endpoint
            .clone()
            .or_else(|| std::env::var(ENDPOINT_ENV).ok())
            .unwrap_or_else(|| DEFAULT_ENDPOINT.to_string());
        Self::new(config, endpoint, api_key)
    }

    pub fn request_body(&self, request: &ProviderRequest) -> Value {
        let content: Vec<Value> = request
            .parts
            .iter()
            .map(|p| match p {
                Part::Text(t) => json!({"type": "text", "text": t}),
                Part::Png(b) => json!({
                    "type": "image_url",
                    "image_url": {"url": format!("data:image/png;base64,{}", STANDARD.encode(b))}
                }),
            })
            .collect();
        json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": content},
            ],
        })
    }
}

fn response_text(body: &Value) -> Option<String> {
    let content = &body["choices"][0]["message"]["content"];
    match content {
        Value::String(s) => Some(s.clone()),
        // Some servers return content as a list of typed parts.
        Value::Array(parts) => Some(
            parts
                .iter()
                .filter_map(|p| p["text"].as_str())
                .collect::<Vec<_>>()
                .join(""),
        ),
        _ => None,
    }
}

impl Provider for LiveProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<String, TransportError> {
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&self.request_body(request))
            .send()
            .map_err(|e| TransportError::retryable(format!("request failed: {e}")))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| TransportError::retryable(format!("reading response failed: {e}")))?;
        if !status.is_success() {
            let snippet: String = text.chars().take(300).collect();
            let msg = format!("HTTP {status}: {snippet}");
            return Err(if status.is_server_error() || status.as_u16() == 429 {
                TransportError::retryable(msg)
            } else {
                TransportError::fatal(msg)
            });
        }
        let body: Value = serde_json::from_str(&text)
            .map_err(|e| TransportError::retryable(format!("response is not JSON: {e}")))?;
        response_text(&body)
            .ok_or_else(|| TransportError::retryable("response has no message content"))
    }
}
