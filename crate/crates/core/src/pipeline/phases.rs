use rayon::prelude::*;

use super::events::{Emitter, EventPayload};
use super::{PipelineConfig, PipelineError};
use crate::heuristics::{apply_static_heuristics, HeuristicReport};
use crate::ingest::{build_contact_sheet, encode_png, ExtractedDeck, ExtractedSlide};
use crate::provider::{
    generate_structured, output_hint, slide_block, AnnotationContext, NeighborSummary, PhaseValue,
    Provider, ProviderRequest, ReconciliationContext, SchemaKind, SynthesisContext, WindowContext,
};
use crate::schema::{
    field_descriptions, validate_final_document, DeckAnalysis, DeckMetadata, FinalDocument,
    ReconciliationResult, SlideAnnotation, SlidePlan, SCHEMA_VERSION,
};
use crate::windowing::{collate_candidates, WindowPlanResult, WindowSpec};

/// Runs `f` over `items` on at most `max_inflight` threads and returns the
/// results in input order.
pub(crate) fn fan_out<T, R, F>(
    items: &[T],
    max_inflight: usize,
    f: F,
) -> Result<Vec<R>, PipelineError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, PipelineError> + Sync + Send,
{
    if max_inflight <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_inflight.min(items.len()))
        .build()
        .map_err(|e| PipelineError::Internal(format!("worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(f).collect())
}

fn unexpected(value: PhaseValue) -> PipelineError {
    PipelineError::Internal(format!("provider returned a {} value", value.phase()))
}

fn window_request(
    deck: &ExtractedDeck,
    window: &WindowSpec,
    config: &PipelineConfig,
) -> Result<ProviderRequest, PipelineError> {
    let slides: Vec<&ExtractedSlide> = window
        .slides()
        .map(|n| {
            deck.slide(n).ok_or_else(|| {
                PipelineError::Internal(format!("window {} names missing slide {n}", window.index))
            })
        })
        .collect::<Result<_, _>>()?;
    let sheet = build_contact_sheet(*window, &slides, config.contact_columns, config.cell_width)?;
    let mut request = ProviderRequest::new(SchemaKind::WindowPlan { window: *window });
    request.push_context(&WindowContext {
        window_index: window.index,
        start_slide: window.start_slide,
        end_slide: window.end_slide,
        total_slides: deck.total_slides(),
    });
    for s in &slides {
        request.push_text(slide_block(s.slide_number, &s.native_text));
    }
    request.push_png(encode_png(&sheet.image)?);
    request.push_text(output_hint(&request.expected_schema));
    Ok(request)
}

/// Plans every window. Each request carries the window's per-slide text
/// blocks followed by its contact sheet.
pub fn run_window_phase(
    deck: &ExtractedDeck,
    windows: &[WindowSpec],
    provider: &dyn Provider,
    config: &PipelineConfig,
    events: &Emitter<'_>,
) -> Result<Vec<WindowPlanResult>, PipelineError> {
    fan_out(windows, config.max_inflight, |window| {
        let request = window_request(deck, window, config)?;
        let (value, transcript) = generate_structured(provider, &request, &config.provider)?;
        let PhaseValue::WindowPlan(plans) = value else {
            return Err(unexpected(value));
        };
        events.emit(EventPayload::WindowPlanned {
            window_index: window.index,
            start_slide: window.start_slide,
            end_slide: window.end_slide,
            attempts: transcript.len(),
        });
        Ok(WindowPlanResult {
            window: *window,
            plans,
        })
    })
}

/// Merges window candidates into one deck analysis and one plan per slide.
pub fn run_synthesis_phase(
    results: &[WindowPlanResult],
    total_slides: u32,
    provider: &dyn Provider,
    config: &PipelineConfig,
    events: &Emitter<'_>,
) -> Result<(DeckAnalysis, Vec<SlidePlan>), PipelineError> {
    let slides = collate_candidates(results, total_slides)?;
    let mut request = ProviderRequest::new(SchemaKind::DeckPlan { total_slides });
    request.push_context(&SynthesisContext {
        total_slides,
        slides,
    });
    request.push_text(output_hint(&request.expected_schema));
    let (value, transcript) = generate_structured(provider, &request, &config.provider)?;
    let PhaseValue::DeckPlan(plan) = value else {
        return Err(unexpected(value));
    };
    events.emit(EventPayload::SynthesisDone {
        total_slides,
        sections: plan.deck_analysis.sections.len(),
        eligible_slides: plan
            .slide_plans
            .iter()
            .filter(|p| p.eligible_for_questions)
            .count(),
        attempts: transcript.len(),
    });
    Ok((plan.deck_analysis, plan.slide_plans))
}

pub fn run_heuristics_phase(
    plans: &[SlidePlan],
    deck: &ExtractedDeck,
    events: &Emitter<'_>,
) -> (Vec<SlidePlan>, HeuristicReport) {
    let (plans, report) = apply_static_heuristics(plans, deck);
    events.emit(EventPayload::HeuristicsApplied {
        report: report.clone(),
    });
    (plans, report)
}

fn neighbors(plans: &[SlidePlan], slide_number: u32) -> Vec<NeighborSummary> {
    plans
        .iter()
        .filter(|p| p.slide_number + 1 == slide_number || p.slide_number == slide_number + 1)
        .map(|p| NeighborSummary {
            slide_number: p.slide_number,
            slide_title: p.slide_title.clone(),
            local_summary: p.local_summary.clone(),
        })
        .collect()
}

/// Annotates one slide with `plan`'s budget. Slides with no budget, or not
/// eligible, are built locally. Returns the provider attempt count (0 when
/// no call was made).
pub fn annotate_slide(
    plan: &SlidePlan,
    all_plans: &[SlidePlan],
    analysis: &DeckAnalysis,
    deck: &ExtractedDeck,
    provider: &dyn Provider,
    config: &PipelineConfig,
) -> Result<(SlideAnnotation, usize), PipelineError> {
    if plan.question_budget == 0 || !plan.eligible_for_questions {
        return Ok((SlideAnnotation::unquestioned(plan), 0));
    }
    let slide = deck.slide(plan.slide_number).ok_or_else(|| {
        PipelineError::Internal(format!("plan names missing slide {}", plan.slide_number))
    })?;
    let section = analysis.section_for(plan.slide_number);
    let mut request = ProviderRequest::new(SchemaKind::SlideAnnotation {
        slide_number: plan.slide_number,
        question_budget: plan.question_budget,
    });
    request.push_png(slide.png()?);
    request.push_text(slide_block(slide.slide_number, &slide.native_text));
    request.push_context(&AnnotationContext {
        slide_plan: plan.clone(),
        deck_topic: analysis.deck_topic.clone(),
        target_audience: analysis.target_audience.clone(),
        learning_goals: analysis.learning_goals.clone(),
        section_title: section.map(|s| s.section_title.clone()).unwrap_or_default(),
        section_summary: section
            .map(|s| s.section_summary.clone())
            .unwrap_or_default(),
        neighbor_summaries: neighbors(all_plans, plan.slide_number),
    });
    request.push_text(output_hint(&request.expected_schema));
    let (value, transcript) = generate_structured(provider, &request, &config.provider)?;
    let PhaseValue::SlideAnnotation(body) = value else {
        return Err(unexpected(value));
    };
    Ok((SlideAnnotation::from_plan(plan, body), transcript.len()))
}

/// Annotates every slide, in slide order.
pub fn run_annotation_phase(
    plans: &[SlidePlan],
    analysis: &DeckAnalysis,
    deck: &ExtractedDeck,
    provider: &dyn Provider,
    config: &PipelineConfig,
    events: &Emitter<'_>,
) -> Result<Vec<SlideAnnotation>, PipelineError> {
    fan_out(plans, config.max_inflight, |plan| {
        let (annotation, attempts) = annotate_slide(plan, plans, analysis, deck, provider, config)?;
        events.emit(EventPayload::SlideAnnotated {
            slide_number: plan.slide_number,
            questions: annotation.questions.len(),
            generated: attempts > 0,
            attempts,
        });
        Ok(annotation)
    })
}

/// Asks for one action per slide. The request is text only: metadata,
/// deck analysis, plans and draft annotations.
pub fn run_reconciliation_phase(
    metadata: &DeckMetadata,
    analysis: &DeckAnalysis,
    annotations: &[SlideAnnotation],
    provider: &dyn Provider,
    config: &PipelineConfig,
) -> Result<(ReconciliationResult, usize), PipelineError> {
    let mut request = ProviderRequest::new(SchemaKind::Reconciliation {
        total_slides: metadata.total_slides,
        current_budgets: annotations.iter().map(|a| a.question_budget).collect(),
    });
    request.push_context(&ReconciliationContext {
        deck_metadata: metadata.clone(),
        deck_analysis: analysis.clone(),
        slide_plans: annotations.iter().map(SlideAnnotation::plan).collect(),
        annotations: annotations.to_vec(),
    });
    request.push_text(output_hint(&request.expected_schema));
    let (value, transcript) = generate_structured(provider, &request, &config.provider)?;
    let PhaseValue::Reconciliation(result) = value else {
        return Err(unexpected(value));
    };
    Ok((result, transcript.len()))
}

/// Assembles and validates the output document.
pub fn compile_final_document(
    metadata: DeckMetadata,
    analysis: DeckAnalysis,
    reconciliation: ReconciliationResult,
    annotations: Vec<SlideAnnotation>,
) -> Result<FinalDocument, PipelineError> {
    let doc = FinalDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        field_descriptions: field_descriptions(),
        deck_metadata: metadata,
        deck_analysis: analysis,
        reconciliation,
        slides: annotations,
    };
    validate_final_document(&doc).map_err(PipelineError::Invalid)?;
    Ok(doc)
}
