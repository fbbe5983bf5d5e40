use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::request::{ProviderRequest, SchemaKind};
use super::{Phase, Provider, ProviderConfig, ProviderError, TransportError};
use crate::schema::{
    validate_annotation_body, validate_deck_plan, validate_reconciliation, validate_slide_plan,
    validate_window_plans, AnnotationBody, DeckPlan, ReconciliationResult, SlidePlan,
    ValidationResult, Violation, WindowPlanOutput,
};

/// A response that parsed and validated against its [`SchemaKind`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PhaseValue {
    WindowPlan(Vec<SlidePlan>),
    DeckPlan(DeckPlan),
    SlideAnnotation(AnnotationBody),
    Reconciliation(ReconciliationResult),
}

impl PhaseValue {
    pub fn phase(&self) -> Phase {
        match self {
            PhaseValue::WindowPlan(_) => Phase::WindowPlanner,
            PhaseValue::DeckPlan(_) => Phase::DeckSynthesis,
            PhaseValue::SlideAnnotation(_) => Phase::SlideAnnotator,
            PhaseValue::Reconciliation(_) => Phase::Reconciliation,
        }
    }

    /// The JSON a model would return for this value.
    pub fn to_wire_json(&self) -> String {
        let value = match self {
            PhaseValue::WindowPlan(slides) => serde_json::to_value(WindowPlanOutput {
                slides: slides.clone(),
            }),
            PhaseValue::DeckPlan(p) => serde_json::to_value(p),
            PhaseValue::SlideAnnotation(b) => serde_json::to_value(b),
            PhaseValue::Reconciliation(r) => serde_json::to_value(r),
        };
        serde_json::to_string(&value.expect("phase values serialize")).expect("json value prints")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranscriptStatus {
    Ok,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub raw_response: String,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairTranscript {
    pub attempts: Vec<Attempt>,
    pub final_status: TranscriptStatus,
}

impl RepairTranscript {
    pub fn len(&self) -> usize {
        self.attempts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attempts.is_empty()
    }
}

/// Locates the JSON payload in a model response: strips Markdown fences and
/// any prose around the outermost object or array.
pub fn extract_json(raw: &str) -> &str {
    let mut s = raw.trim();
    if let Some(rest) = s.strip_prefix("```") {
        let rest = rest.split_once('\n').map_or("", |(_, body)| body);
        s = rest.trim_end().strip_suffix("```").unwrap_or(rest).trim();
    }
    if s.starts_with('{') || s.starts_with('[') {
        return s;
    }
    match (s.find(['{', '[']), s.rfind(['}', ']'])) {
        (Some(a), Some(b)) if a < b => &s[a..=b],
        _ => s,
    }
}

fn decode<T: DeserializeOwned>(json: &str) -> Result<T, Vec<String>> {
    serde_json::from_str(json)
        .map_err(|e| vec![format!("response is not valid JSON for this schema: {e}")])
}

fn violations(result: ValidationResult) -> Result<(), Vec<String>> {
    result.map_err(|vs| vs.iter().map(Violation::to_string).collect())
}

/// Parses and validates one raw response against `kind`. On failure returns
/// human-readable violations suitable for a repair prompt.
pub fn parse_phase_value(kind: &SchemaKind, raw: &str) -> Result<PhaseValue, Vec<String>> {
    let json = extract_json(raw);
    match kind {
        SchemaKind::WindowPlan { window } => {
            // Accept a bare array as well as {"slides": [...]}.
            let slides = if json.starts_with('[') {
                decode::<Vec<SlidePlan>>(json)?
            } else {
                decode::<WindowPlanOutput>(json)?.slides
            };
            let mut errs: Vec<String> = slides
                .iter()
                .filter_map(|p| validate_slide_plan(p).err())
                .flatten()
                .map(|v| v.to_string())
                .collect();
            if let Err(vs) = validate_window_plans(&slides, window) {
                errs.extend(vs.iter().map(Violation::to_string));
            }
            if errs.is_empty() {
                Ok(PhaseValue::WindowPlan(slides))
            } else {
                Err(errs)
            }
        }
        SchemaKind::DeckPlan { total_slides } => {
            let plan: DeckPlan = decode(json)?;
            violations(validate_deck_plan(&plan, *total_slides))?;
            Ok(PhaseValue::DeckPlan(plan))
        }
        SchemaKind::SlideAnnotation {
            question_budget, ..
        } => {
            let body: AnnotationBody = decode(json)?;
            violations(validate_annotation_body(&body, *question_budget))?;
            Ok(PhaseValue::SlideAnnotation(body))
        }
        SchemaKind::Reconciliation {
            total_slides,
            current_budgets,
        } => {
            let result: ReconciliationResult = decode(json)?;
            violations(validate_reconciliation(
                &result,
                *total_slides,
                Some(current_budgets),
            ))?;
            Ok(PhaseValue::Reconciliation(result))
        }
    }
}

fn call_with_transport_retry(
    provider: &dyn Provider,
    request: &ProviderRequest,
    config: &ProviderConfig,
) -> Result<String, ProviderError> {
    let mut last: Option<TransportError> = None;
    for attempt in 0..=config.transport_retries {
        match provider.complete(request) {
            Ok(raw) => return Ok(raw),
            Err(e) => {
                tracing::warn!(phase = %request.phase, attempt, error = %e, "provider call failed");
                let retryable = e.retryable;
                last = Some(e);
                if !retryable {
                    break;
                }
                if !config.retry_backoff.is_zero() {
                    std::thread::sleep(config.retry_backoff * (attempt + 1));
                }
            }
        }
    }
    Err(ProviderError::Unavailable {
        phase: request.phase,
        message: last.map(|e| e.message).unwrap_or_default(),
    })
}

/// Calls the provider until its response parses and validates, resending
/// the original request plus the latest violations after each failure.
pub fn generate_structured(
    provider: &dyn Provider,
    request: &ProviderRequest,
    config: &ProviderConfig,
) -> Result<(PhaseValue, RepairTranscript), ProviderError> {
    if !request.is_canonical() {
        return Err(ProviderError::MalformedRequest(format!(
            "system prompt does not match the {} prompt",
            request.phase
        )));
    }
    let mut attempts = Vec::new();
    let mut current = request.clone();
    for _ in 0..=config.max_repair_retries {
        let raw = call_with_transport_retry(provider, &current, config)?;
        match parse_phase_value(&request.expected_schema, &raw) {
            Ok(value) => {
                attempts.push(Attempt {
                    raw_response: raw,
                    violations: Vec::new(),
                });
                let transcript = RepairTranscript {
                    attempts,
                    final_status: TranscriptStatus::Ok,
                };
                return Ok((value, transcript));
            }
            Err(violations) => {
                tracing::debug!(phase = %request.phase, count = violations.len(), "response failed validation");
                current = request.with_repair(&violations);
                attempts.push(Attempt {
                    raw_response: raw,
                    violations,
                });
            }
        }
    }
    Err(ProviderError::SchemaExhausted {
        phase: request.phase,
        transcript: RepairTranscript {
            attempts,
            final_status: TranscriptStatus::Exhausted,
        },
    })
}
