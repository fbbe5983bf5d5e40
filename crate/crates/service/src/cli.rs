use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use clap::{ArgGroup, Args, Parser, Subcommand};

use deckqa_core::ingest::DEFAULT_RENDER_SCALE;
use deckqa_core::pipeline::{
    Clock, DeckSource, EventPayload, FixedClock, PipelineConfig, PipelineEvent, SystemClock,
    DEFAULT_MAX_INFLIGHT,
};
use deckqa_core::provider::{
    ProviderConfig, ProviderMode, DEFAULT_MAX_REPAIR_RETRIES, DEFAULT_MODEL,
};
use deckqa_core::windowing::{DEFAULT_OVERLAP, DEFAULT_WINDOW_SIZE};

use crate::fetch::DEFAULT_MAX_UPLOAD;

/// Timestamp used by `--fixed-clock` when no value is given.
pub const DEFAULT_FIXED_CLOCK: &str = "2025-01-01T00:00:00Z";

#[derive(Debug, Parser)]
#[command(
    name = "deckqa",
    version,
    about = "Generate validated question sets from lecture slide PDFs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one deck; events go to stderr as NDJSON.
    Analyze(AnalyzeArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Write the built-in 20-slide synthetic lecture PDF.
    Sample {
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Use the deterministic offline provider (default).
    #[arg(long, conflicts_with = "live")]
    pub mock: bool,
    /// Call the hosted model; needs LLM_API_KEY.
    #[arg(long)]
    pub live: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_WINDOW_SIZE)]
    pub window_size: u32,
    #[arg(long, default_value_t = DEFAULT_OVERLAP)]
    pub overlap: u32,
    #[arg(long, default_value_t = DEFAULT_RENDER_SCALE)]
    pub render_scale: f64,
    #[arg(long, default_value = DEFAULT_MODEL)]
    pub model: String,
    #[arg(long, default_value_t = DEFAULT_MAX_REPAIR_RETRIES)]
    pub max_repair_retries: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_INFLIGHT)]
    pub max_inflight: usize,
    /// Stamp every timestamp with this instant (RFC 3339).
    #[arg(long, value_name = "TIME", num_args = 0..=1, default_missing_value = DEFAULT_FIXED_CLOCK, value_parser = parse_time)]
    pub fixed_clock: Option<DateTime<Utc>>,
}

fn parse_time(s: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("expected an RFC 3339 time such as {DEFAULT_FIXED_CLOCK}: {e}"))
}

impl RunArgs {
    pub fn pipeline_config(&self) -> PipelineConfig {
        let provider = if self.live {
            ProviderConfig {
                mode: ProviderMode::Live,
                seed: self.seed,
                ..ProviderConfig::default()
            }
        } else {
            ProviderConfig::mock(self.seed)
        };
        let clock: Arc<dyn Clock> = match self.fixed_clock {
            Some(t) => Arc::new(FixedClock(t)),
            None => Arc::new(SystemClock),
        };
        PipelineConfig {
            window_size: self.window_size,
            overlap: self.overlap,
            render_scale: self.render_scale,
            provider: ProviderConfig {
                model_name: self.model.clone(),
                max_repair_retries: self.max_repair_retries,
                ..provider
            },
            max_inflight: self.max_inflight,
            clock,
            ..PipelineConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "url"])))]
pub struct AnalyzeArgs {
    /// PDF file to analyze.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// PDF to download and analyze.
    #[arg(long, value_name = "URL")]
    pub url: Option<String>,
    /// Where to write the final document; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write each stage's output to this directory.
    #[arg(long, value_name = "DIR")]
    pub debug_dir: Option<PathBuf>,
    /// Citation string recorded as deck metadata.
    #[arg(long)]
    pub deck: Option<String>,
    /// Canonical deck URL recorded as metadata.
    #[arg(long)]
    pub deck_url: Option<String>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, env = "PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "0.0.0.0")]
    pub host: String,
    #[arg(long, default_value_t = DEFAULT_MAX_UPLOAD)]
    pub max_upload_bytes: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

impl AnalyzeArgs {
    pub fn pipeline_config(&self, source_file: String) -> PipelineConfig {
        PipelineConfig {
            source: DeckSource {
                source_file,
                deck: self.deck.clone(),
                deck_url: self.deck_url.clone(),
            },
            debug_dir: self.debug_dir.clone(),
            ..self.run.pipeline_config()
        }
    }
}

/// Writes one event per line to stderr.
pub fn write_event_line(event: &PipelineEvent) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", event.to_json_line());
}

/// The terminal error line for failures outside the pipeline itself.
pub fn error_event(clock: &dyn Clock, message: String, status: u16) -> PipelineEvent {
    PipelineEvent {
        at: clock.now(),
        payload: EventPayload::Error { message, status },
    }
}

pub const EXIT_PIPELINE_ERROR: u8 = 1;

/// Runs `deckqa analyze`. Returns 0 on a completed run, 1 otherwise.
pub fn run_analyze(args: &AnalyzeArgs) -> u8 {
    let mut config = args.pipeline_config(String::new());
    let clock = config.clock.clone();
    let fail = |message: String, status: u16| {
        write_event_line(&error_event(clock.as_ref(), message, status));
        EXIT_PIPELINE_ERROR
    };

    let (source_file, bytes) = match load_source(args) {
        Ok(v) => v,
        Err((message, status)) => return fail(message, status),
    };
    config.source.source_file = source_file;
    let provider = match deckqa_core::provider::build_provider(&config.provider) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string(), 500),
    };

    let sink = deckqa_core::pipeline::FnSink::new(|e: PipelineEvent| write_event_line(&e));
    let doc = match deckqa_core::pipeline::run_pipeline(&bytes, &config, provider.as_ref(), &sink) {
        Ok(doc) => doc,
        // The pipeline already emitted its terminal error event.
        Err(_) => return EXIT_PIPELINE_ERROR,
    };
    let text = deckqa_core::schema::serialize_document(&doc);
    let written = match &args.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("writing {}: {e}", path.display()))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| format!("writing stdout: {e}")),
    };
    match written {
        Ok(()) => 0,
        Err(message) => {
            eprintln!("{message}");
            EXIT_PIPELINE_ERROR
        }
    }
}

fn load_source(args: &AnalyzeArgs) -> Result<(String, Vec<u8>), (String, u16)> {
    if let Some(path) = &args.input {
        let bytes =
            std::fs::read(path).map_err(|e| (format!("reading {}: {e}", path.display()), 400))?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "deck.pdf".to_string());
        return Ok((name, bytes));
    }
    let url = args.url.as_deref().expect("clap requires --input or --url");
    let bad = |e: crate::fetch::FetchError| {
        let status = if matches!(e, crate::fetch::FetchError::TooLarge { .. }) {
            413
        } else {
            400
        };
        (e.to_string(), status)
    };
    let url = crate::fetch::parse_http_url(url).map_err(bad)?;
    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| (format!("starting runtime: {e}"), 500))?;
    let bytes = runtime
        .block_on(crate::fetch::fetch_pdf(
            &reqwest::Client::new(),
            &url,
            DEFAULT_MAX_UPLOAD,
        ))
        .map_err(bad)?;
    Ok((crate::fetch::file_name_from_url(&url), bytes))
}
