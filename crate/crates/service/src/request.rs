use serde::Deserialize;

use deckqa_core::pipeline::PipelineConfig;
use deckqa_core::provider::{ProviderConfig, ProviderMode};

use crate::fetch::FetchError;

/// Per-request adjustments to the server's base configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub window_size: Option<u32>,
    pub overlap: Option<u32>,
    #[serde(alias = "provider_mode")]
    pub mode: Option<ProviderMode>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut PipelineConfig) {
        if let Some(n) = self.window_size {
            config.window_size = n;
        }
        if let Some(n) = self.overlap {
            config.overlap = n;
        }
        if let Some(mode) = self.mode {
            if mode != config.provider.mode {
                let seed = config.provider.seed;
                config.provider = match mode {
                    ProviderMode::Mock => ProviderConfig::mock(seed),
                    ProviderMode::Live => ProviderConfig {
                        mode,
                        seed,
                        ..ProviderConfig::default()
                    },
                };
            }
        }
        if let Some(seed) = self.seed {
            config.provider.seed = seed;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Upload { file_name: String, bytes: Vec<u8> },
    Url(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeRequest {
    pub source: Source,
    pub overrides: Overrides,
    pub deck_citation: Option<String>,
    pub deck_url: Option<String>,
}

/// The JSON body alternative to a multipart upload.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonAnalyzeBody {
    pub url: Option<String>,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(alias = "deck")]
    pub deck_citation: Option<String>,
    pub deck_url: Option<String>,
}

/// Fields collected from either request form, before the source rule is
/// checked.
#[derive(Debug, Default)]
pub struct RawAnalyzeRequest {
    pub file: Option<(String, Vec<u8>)>,
    pub url: Option<String>,
    pub overrides: Overrides,
    pub deck_citation: Option<String>,
    pub deck_url: Option<String>,
}

impl From<JsonAnalyzeBody> for RawAnalyzeRequest {
    fn from(b: JsonAnalyzeBody) -> Self {
        Self {
            file: None,
            url: b.url,
            overrides: b.overrides,
            deck_citation: b.deck_citation,
            deck_url: b.deck_url,
        }
    }
}

impl RawAnalyzeRequest {
    /// Enforces exactly one source. Blank strings count as absent.
    pub fn finish(self) -> Result<AnalyzeRequest, RequestError> {
        let url = self.url.filter(|u| !u.trim().is_empty());
        let source = match (self.file, url) {
            (Some((file_name, bytes)), None) => Source::Upload { file_name, bytes },
            (None, Some(url)) => Source::Url(url),
            (Some(_), Some(_)) => {
                return Err(RequestError::BadRequest(
                    "provide either a file or a url, not both".into(),
                ))
            }
            (None, None) => {
                return Err(RequestError::BadRequest(
                    "provide a PDF as multipart field \"file\" or a JSON body {\"url\": ...}"
                        .into(),
                ))
            }
        };
        let blank_to_none = |s: Option<String>| s.filter(|v| !v.trim().is_empty());
        Ok(AnalyzeRequest {
            source,
            overrides: self.overrides,
            deck_citation: blank_to_none(self.deck_citation),
            deck_url: blank_to_none(self.deck_url),
        })
    }
}

/// Failures answered with a plain HTTP error before any streaming starts.
#[derive(Debug, thiserror::Error)]
pub enum RequestError {
    #[error("{0}")]
    BadRequest(String),
    #[error("upload exceeds the {limit}-byte limit")]
    TooLarge { limit: usize },
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{0}")]
    Server(String),
}

impl RequestError {
    pub fn status(&self) -> u16 {
        match self {
            RequestError::BadRequest(_) => 400,
            RequestError::TooLarge { .. } | RequestError::Fetch(FetchError::TooLarge { .. }) => 413,
            RequestError::Fetch(_) => 400,
            RequestError::Server(_) => 500,
        }
    }
}
