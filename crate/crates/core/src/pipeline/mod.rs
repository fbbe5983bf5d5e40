//! End-to-end orchestration.
//!
//! Stages: preprocess, window planning, deck synthesis, static heuristics,
//! annotation, reconciliation, re-annotation of slides whose budget the
//! reconciler changed, and compilation. Progress is reported through an
//! [`EventSink`]; the run ends with exactly one `completed` or `error` event.

mod events;
mod phases;
mod reconcile;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use events::{
    ChannelSink, Clock, Emitter, EventPayload, EventSink, FixedClock, FnSink, NullSink,
    PipelineEvent, Stage, SystemClock, VecSink,
};
pub use phases::{
    annotate_slide, compile_final_document, run_annotation_phase, run_heuristics_phase,
    run_reconciliation_phase, run_synthesis_phase, run_window_phase,
};
pub use reconcile::{apply_reconciliation, ReconcileError};

use crate::heuristics::HeuristicReport;
use crate::ingest::{
    extract_deck, IngestError, DEFAULT_CELL_WIDTH, DEFAULT_CONTACT_COLUMNS, DEFAULT_RENDER_SCALE,
};
use crate::provider::{Provider, ProviderConfig, ProviderError};
use crate::schema::{
    serialize_document, DeckAnalysis, DeckMetadata, FinalDocument, ReconciliationResult,
    SlideAnnotation, SlidePlan, Violation,
};
use crate::windowing::{plan_windows, WindowError, DEFAULT_OVERLAP, DEFAULT_WINDOW_SIZE};

pub const DEFAULT_MAX_INFLIGHT: usize = 4;

/// Caller-supplied deck metadata; never inferred by the model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeckSource {
    pub source_file: String,
    pub deck: Option<String>,
    pub deck_url: Option<String>,
}

#[derive(Clone)]
pub struct PipelineConfig {
    pub window_size: u32,
    pub overlap: u32,
    pub render_scale: f64,
    pub provider: ProviderConfig,
    pub contact_columns: u32,
    pub cell_width: u32,
    pub max_inflight: usize,
    pub clock: Arc<dyn Clock>,
    pub source: DeckSource,
    /// When set, each stage's output is written here as JSON.
    pub debug_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window_size: DEFAULT_WINDOW_SIZE,
            overlap: DEFAULT_OVERLAP,
            render_scale: DEFAULT_RENDER_SCALE,
            provider: ProviderConfig::default(),
            contact_columns: DEFAULT_CONTACT_COLUMNS,
            cell_width: DEFAULT_CELL_WIDTH,
            max_inflight: DEFAULT_MAX_INFLIGHT,
            clock: Arc::new(SystemClock),
            source: DeckSource {
                source_file: "deck.pdf".to_string(),
                ..DeckSource::default()
            },
            debug_dir: None,
        }
    }
}

impl std::fmt::Debug for PipelineConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PipelineConfig")
            .field("window_size", &self.window_size)
            .field("overlap", &self.overlap)
            .field("render_scale", &self.render_scale)
            .field("provider", &self.provider)
            .field("contact_columns", &self.contact_columns)
            .field("cell_width", &self.cell_width)
            .field("max_inflight", &self.max_inflight)
            .field("source", &self.source)
            .field("debug_dir", &self.debug_dir)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Reconcile(#[from] ReconcileError),
    #[error("compiled document failed validation: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("debug dump to {path}: {source}")]
    Dump {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl PipelineError {
    /// HTTP-style status reported in the terminal error event.
    pub fn status(&self) -> u16 {
        match self {
            PipelineError::Ingest(_) => 422,
            PipelineError::Window(WindowError::InvalidParameters { .. })
            | PipelineError::Config(_) => 400,
            PipelineError::Provider(ProviderError::Config(_)) => 500,
            PipelineError::Provider(_) => 502,
            _ => 500,
        }
    }
}

/// First 12 hex digits of the SHA-256 of the PDF bytes.
pub fn deck_id(pdf_bytes: &[u8]) -> String {
    let digest = Sha256::digest(pdf_bytes);
    hex::encode(&digest[..6])
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.max_inflight == 0 {
            return Err(PipelineError::Config(
                "max_inflight must be at least 1".into(),
            ));
        }
        if self.window_size < 2 || self.overlap >= self.window_size {
            return Err(PipelineError::Config(format!(
                "window_size must be >= 2 and overlap < window_size (got {} and {})",
                self.window_size, self.overlap
            )));
        }
        self.provider.validate()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct HeuristicsDump<'a> {
    report: &'a HeuristicReport,
    slide_plans: &'a [SlidePlan],
}

#[derive(Serialize)]
struct DeckDump<'a> {
    deck_analysis: &'a DeckAnalysis,
    slide_plans: &'a [SlidePlan],
}

#[derive(Serialize)]
struct ReconciliationDump<'a> {
    result: &'a ReconciliationResult,
    rerun_slides: &'a BTreeSet<u32>,
}

struct Dumper<'a>(Option<&'a Path>);

impl Dumper<'_> {
    fn write<T: Serialize>(&self, name: &str, value: &T) -> Result<(), PipelineError> {
        let Some(dir) = self.0 else { return Ok(()) };
        let json = serde_json::to_string_pretty(value)
            .map_err(|e| PipelineError::Internal(e.to_string()))?;
        self.write_raw(dir, name, json + "\n")
    }

    fn write_raw(&self, dir: &Path, name: &str, text: String) -> Result<(), PipelineError> {
        let path = dir.join(name);
        std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&path, text))
            .map_err(|source| PipelineError::Dump { path, source })
    }
}

/// Runs every stage on `pdf_bytes`. Emits `phase_started(preprocess)`
/// first and exactly one terminal event last.
pub fn run_pipeline(
    pdf_bytes: &[u8],
    config: &PipelineConfig,
    provider: &dyn Provider,
    sink: &dyn EventSink,
) -> Result<FinalDocument, PipelineError> {
    let events = Emitter::new(sink, config.clock.as_ref());
    match run_stages(pdf_bytes, config, provider, &events) {
        Ok(doc) => {
            events.emit(EventPayload::Completed {
                document: Box::new(doc.clone()),
            });
            Ok(doc)
        }
        Err(e) => {
            tracing::error!(error = %e, "pipeline failed");
            events.emit(EventPayload::Error {
                message: e.to_string(),
                status: e.status(),
            });
            Err(e)
        }
    }
}

fn run_stages(
    pdf_bytes: &[u8],
    config: &PipelineConfig,
    provider: &dyn Provider,
    events: &Emitter<'_>,
) -> Result<FinalDocument, PipelineError> {
    events.stage(Stage::Preprocess);
    config.validate()?;
    let dump = Dumper(config.debug_dir.as_deref());
    let processed_at = config.clock.now();
    let deck = extract_deck(&config.source.source_file, pdf_bytes, config.render_scale)?;
    let total = deck.total_slides();
    let metadata = DeckMetadata {
        deck_id: deck_id(pdf_bytes),
        deck: config.source.deck.clone(),
        deck_url: config.source.deck_url.clone(),
        source_file: config.source.source_file.clone(),
        total_slides: total,
        processed_at,
    };
    let windows = plan_windows(total, config.window_size, config.overlap)?;

    events.stage(Stage::WindowPlanning);
    let window_results = run_window_phase(&deck, &windows, provider, config, events)?;
    dump.write("phase1_windows.json", &window_results)?;

    events.stage(Stage::DeckSynthesis);
    let (analysis, plans) = run_synthesis_phase(&window_results, total, provider, config, events)?;
    dump.write(
        "phase2_deck.json",
        &DeckDump {
            deck_analysis: &analysis,
            slide_plans: &plans,
        },
    )?;

    events.stage(Stage::Heuristics);
    let (plans, report) = run_heuristics_phase(&plans, &deck, events);
    dump.write(
        "phase2b_heuristics.json",
        &HeuristicsDump {
            report: &report,
            slide_plans: &plans,
        },
    )?;

    events.stage(Stage::Annotation);
    let annotations = run_annotation_phase(&plans, &analysis, &deck, provider, config, events)?;
    dump.write("phase3_annotations.json", &annotations)?;

    events.stage(Stage::Reconciliation);
    let (result, attempts) =
        run_reconciliation_phase(&metadata, &analysis, &annotations, provider, config)?;
    let (mut annotations, rerun) = apply_reconciliation(&annotations, &result)?;
    events.emit(EventPayload::ReconciliationDone {
        actions: result.revised_slide_actions.len(),
        rerun_slides: rerun.iter().copied().collect(),
        attempts,
    });
    dump.write(
        "phase4_reconciliation.json",
        &ReconciliationDump {
            result: &result,
            rerun_slides: &rerun,
        },
    )?;

    if !rerun.is_empty() {
        events.stage(Stage::Reannotation);
        annotations = rerun_annotations(
            annotations,
            &rerun,
            &analysis,
            &deck,
            provider,
            config,
            events,
        )?;
    }

    events.stage(Stage::Compile);
    let doc = compile_final_document(metadata, analysis, result, annotations)?;
    if let Some(dir) = dump.0 {
        dump.write_raw(dir, "final.json", serialize_document(&doc))?;
    }
    Ok(doc)
}

fn rerun_annotations(
    mut annotations: Vec<SlideAnnotation>,
    rerun: &BTreeSet<u32>,
    analysis: &DeckAnalysis,
    deck: &crate::ingest::ExtractedDeck,
    provider: &dyn Provider,
    config: &PipelineConfig,
    events: &Emitter<'_>,
) -> Result<Vec<SlideAnnotation>, PipelineError> {
    let plans: Vec<SlidePlan> = annotations.iter().map(SlideAnnotation::plan).collect();
    let targets: Vec<&SlidePlan> = plans
        .iter()
        .filter(|p| rerun.contains(&p.slide_number))
        .collect();
    let redone = phases::fan_out(&targets, config.max_inflight, |plan| {
        let (annotation, attempts) =
            annotate_slide(plan, &plans, analysis, deck, provider, config)?;
        events.emit(EventPayload::SlideReannotated {
            slide_number: plan.slide_number,
            questions: annotation.questions.len(),
            attempts,
        });
        Ok(annotation)
    })?;
    for a in redone {
        let slot = annotations
            .iter_mut()
            .find(|s| s.slide_number == a.slide_number)
            .expect("rerun slides come from the annotation set");
        *slot = a;
    }
    Ok(annotations)
}
