//! Model access behind a structured-output contract.
//!
//! A [`Provider`] turns a [`ProviderRequest`] into raw response text.
//! [`generate_structured`] parses and validates that text and, on failure,
//! resends the request with the violations appended.

mod live;
mod mock;
pub mod prompts;
mod request;
mod structured;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use live::{LiveProvider, API_KEY_ENV, DEFAULT_ENDPOINT, ENDPOINT_ENV};
pub use mock::{mock_generate, MockProvider};
pub use request::{
    output_hint, slide_block, AnnotationContext, NeighborSummary, Part, Phase, ProviderRequest,
    ReconciliationContext, SchemaKind, SynthesisContext, WindowContext, CONTEXT_HEADER,
    REPAIR_HEADER,
};
pub use structured::{
    extract_json, generate_structured, parse_phase_value, Attempt, PhaseValue, RepairTranscript,
    TranscriptStatus,
};

pub const DEFAULT_MAX_REPAIR_RETRIES: u32 = 2;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);
pub const DEFAULT_MODEL: &str = "gpt-4o";

/// A failed call to the backing model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportError {
    pub message: String,
    /// False for failures a retry cannot fix (bad credentials, 4xx).
    pub retryable: bool,
}

impl TransportError {
    pub fn retryable(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            retryable: true,
        }
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            retryable: false,
        }
    }
}

impl fmt::Display for TransportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for TransportError {}

/// Sends one request to a model and returns its raw text. Must be safe to
/// call from several threads at once.
pub trait Provider: Send + Sync {
    fn complete(&self, request: &ProviderRequest) -> Result<String, TransportError>;
}

impl<P: Provider + ?Sized> Provider for &P {
    fn complete(&self, request: &ProviderRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

impl<P: Provider + ?Sized> Provider for Box<P> {
    fn complete(&self, request: &ProviderRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

impl<P: Provider + ?Sized> Provider for std::sync::Arc<P> {
    fn complete(&self, request: &ProviderRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("{phase} provider unavailable: {message}")]
    Unavailable { phase: Phase, message: String },
    #[error("{phase} output failed validation after {} attempts", transcript.attempts.len())]
    SchemaExhausted {
        phase: Phase,
        transcript: RepairTranscript,
    },
    #[error("malformed provider request: {0}")]
    MalformedRequest(String),
    #[error("provider configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderMode {
    Live,
    #[default]
    Mock,
}

impl std::str::FromStr for ProviderMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "live" => Ok(ProviderMode::Live),
            "mock" => Ok(ProviderMode::Mock),
            other => Err(format!("mode must be live or mock, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub mode: ProviderMode,
    pub model_name: String,
    /// Chat-completions URL for live mode. `None` reads `LLM_ENDPOINT`, then
    /// falls back to [`DEFAULT_ENDPOINT`].
    pub endpoint: Option<String>,
    pub max_repair_retries: u32,
    /// Extra attempts after a transport failure, per call.
    pub transport_retries: u32,
    #[serde(with = "duration_secs")]
    pub timeout: Duration,
    #[serde(with = "duration_secs")]
    pub retry_backoff: Duration,
    pub temperature: f64,
    pub seed: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            mode: ProviderMode::Mock,
            model_name: DEFAULT_MODEL.to_string(),
            endpoint: None,
            max_repair_retries: DEFAULT_MAX_REPAIR_RETRIES,
            transport_retries: 2,
            timeout: DEFAULT_TIMEOUT,
            retry_backoff: Duration::from_secs(1),
            temperature: 0.0,
            seed: 0,
        }
    }
}

impl ProviderConfig {
    pub fn mock(seed: u64) -> Self {
        Self {
            mode: ProviderMode::Mock,
            seed,
            retry_backoff: Duration::ZERO,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(ProviderError::Config(format!(
                "temperature must be a non-negative number, got {}",
                self.temperature
            )));
        }
        if self.timeout.is_zero() {
            return Err(ProviderError::Config("timeout must be positive".into()));
        }
        Ok(())
    }
}

/// The provider selected by `config.mode`.
pub fn build_provider(config: &ProviderConfig) -> Result<Box<dyn Provider>, ProviderError> {
    config.validate()?;
    Ok(match config.mode {
        ProviderMode::Mock => Box::new(MockProvider::new(config.seed)),
        ProviderMode::Live => Box::new(LiveProvider::from_env(config)?),
    })
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}
