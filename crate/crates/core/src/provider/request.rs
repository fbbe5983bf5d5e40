use std::fmt;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::prompts::{
    DECK_SYNTHESIS_PROMPT, RECONCILIATION_PROMPT, SLIDE_ANNOTATOR_PROMPT, WINDOW_PLANNER_PROMPT,
};
use crate::schema::{DeckAnalysis, DeckMetadata, SlideAnnotation, SlidePlan};
use crate::windowing::{SlideCandidates, WindowSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    WindowPlanner,
    DeckSynthesis,
    SlideAnnotator,
    Reconciliation,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::WindowPlanner => "window_planner",
            Phase::DeckSynthesis => "deck_synthesis",
            Phase::SlideAnnotator => "slide_annotator",
            Phase::Reconciliation => "reconciliation",
        }
    }

    pub fn system_prompt(self) -> &'static str {
        match self {
            Phase::WindowPlanner => WINDOW_PLANNER_PROMPT,
            Phase::DeckSynthesis => DECK_SYNTHESIS_PROMPT,
            Phase::SlideAnnotator => SLIDE_ANNOTATOR_PROMPT,
            Phase::Reconciliation => RECONCILIATION_PROMPT,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What the response must parse into, with the context needed to validate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemaKind {
    WindowPlan {
        window: WindowSpec,
    },
    DeckPlan {
        total_slides: u32,
    },
    SlideAnnotation {
        slide_number: u32,
        question_budget: u8,
    },
    Reconciliation {
        total_slides: u32,
        current_budgets: Vec<u8>,
    },
}

impl SchemaKind {
    pub fn phase(&self) -> Phase {
        match self {
            SchemaKind::WindowPlan { .. } => Phase::WindowPlanner,
            SchemaKind::DeckPlan { .. } => Phase::DeckSynthesis,
            SchemaKind::SlideAnnotation { .. } => Phase::SlideAnnotator,
            SchemaKind::Reconciliation { .. } => Phase::Reconciliation,
        }
    }
}

/// One ordered piece of user content.
#[derive(Clone, PartialEq, Eq)]
pub enum Part {
    Text(String),
    /// PNG-encoded image.
    Png(Arc<[u8]>),
}

impl fmt::Debug for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Part::Text(t) => f.debug_tuple("Text").field(t).finish(),
            Part::Png(b) => write!(f, "Png({} bytes)", b.len()),
        }
    }
}

/// Header line of the JSON input part every request carries.
pub const CONTEXT_HEADER: &str = "Input (JSON):";
pub const REPAIR_HEADER: &str = "Your previous response failed validation. Fix every problem below and return the corrected JSON only:";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderRequest {
    pub phase: Phase,
    pub system_prompt: &'static str,
    pub parts: Vec<Part>,
    pub expected_schema: SchemaKind,
}

impl ProviderRequest {
    pub fn new(expected_schema: SchemaKind) -> Self {
        let phase = expected_schema.phase();
        Self {
            phase,
            system_prompt: phase.system_prompt(),
            parts: Vec::new(),
            expected_schema,
        }
    }

    /// True when the system prompt is the phase's own prompt.
    pub fn is_canonical(&self) -> bool {
        self.system_prompt == self.phase.system_prompt()
            && self.expected_schema.phase() == self.phase
    }

    pub fn push_text(&mut self, text: impl Into<String>) -> &mut Self {
        self.parts.push(Part::Text(text.into()));
        self
    }

    pub fn push_png(&mut self, png: impl Into<Arc<[u8]>>) -> &mut Self {
        self.parts.push(Part::Png(png.into()));
        self
    }

    pub fn push_context<T: Serialize>(&mut self, context: &T) -> &mut Self {
        let json = serde_json::to_string_pretty(context).expect("context serializes");
        self.push_text(format!("{CONTEXT_HEADER}\n{json}"))
    }

    pub fn text_parts(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().filter_map(|p| match p {
            Part::Text(t) => Some(t.as_str()),
            Part::Png(_) => None,
        })
    }

    pub fn image_parts(&self) -> impl Iterator<Item = &[u8]> {
        self.parts.iter().filter_map(|p| match p {
            Part::Png(b) => Some(&b[..]),
            Part::Text(_) => None,
        })
    }

    /// Decodes the JSON input part.
    pub fn context<T: DeserializeOwned>(&self) -> Option<T> {
        self.text_parts()
            .find_map(|t| t.strip_prefix(CONTEXT_HEADER))
            .and_then(|json| serde_json::from_str(json.trim_start()).ok())
    }

    /// `(slide_number, text)` for every `Slide N:` block, in order.
    pub fn slide_blocks(&self) -> Vec<(u32, &str)> {
        self.text_parts().filter_map(parse_slide_block).collect()
    }

    /// A copy of this request with a repair note listing `violations`.
    pub fn with_repair(&self, violations: &[String]) -> Self {
        let mut next = self.clone();
        let mut note = String::from(REPAIR_HEADER);
        for v in violations {
            note.push_str("\n- ");
            note.push_str(v);
        }
        next.push_text(note);
        next
    }
}

pub fn slide_block(slide_number: u32, text: &str) -> String {
    let body = text.trim();
    if body.is_empty() {
        format!("Slide {slide_number}:\n(no extractable text)")
    } else {
        format!("Slide {slide_number}:\n{body}")
    }
}

fn parse_slide_block(part: &str) -> Option<(u32, &str)> {
    let rest = part.strip_prefix("Slide ")?;
    let (number, body) = rest.split_once(":\n")?;
    let n: u32 = number.parse().ok()?;
    let body = if body == "(no extractable text)" {
        ""
    } else {
        body
    };
    Some((n, body))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowContext {
    pub window_index: usize,
    pub start_slide: u32,
    pub end_slide: u32,
    pub total_slides: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisContext {
    pub total_slides: u32,
    pub slides: Vec<SlideCandidates>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborSummary {
    pub slide_number: u32,
    pub slide_title: String,
    pub local_summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationContext {
    pub slide_plan: SlidePlan,
    pub deck_topic: String,
    pub target_audience: String,
    pub learning_goals: Vec<String>,
    pub section_title: String,
    pub section_summary: String,
    pub neighbor_summaries: Vec<NeighborSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconciliationContext {
    pub deck_metadata: DeckMetadata,
    pub deck_analysis: DeckAnalysis,
    pub slide_plans: Vec<SlidePlan>,
    pub annotations: Vec<SlideAnnotation>,
}

/// Output shape reminders appended to each request.
pub fn output_hint(kind: &SchemaKind) -> String {
    match kind {
        SchemaKind::WindowPlan { window } => format!(
            "Respond with one JSON object {{\"slides\": [...]}} holding exactly one entry per slide {}..{}. Each entry has: slide_number, slide_title, local_summary, modality_type, role_in_deck, eligible_for_questions, eligibility_reason, question_budget, question_mix.",
            window.start_slide, window.end_slide
        ),
        SchemaKind::DeckPlan { total_slides } => format!(
            "Respond with one JSON object {{\"deck_analysis\": {{deck_topic, target_audience, learning_goals, sections: [{{section_id, start_slide, end_slide, section_title, section_summary}}], coverage_targets, global_notes}}, \"slide_plans\": [...]}}. slide_plans holds exactly one plan per slide 1..{total_slides}, ordered; each plan has the same fields as the window plans."
        ),
        SchemaKind::SlideAnnotation { question_budget, .. } => format!(
            "Respond with one JSON object {{\"key_concepts\": [...], \"evidence_regions\": [...], \"questions\": [...], \"evaluation\": {{coverage_score, coverage_notes, scaffolding_score, scaffolding_notes}}}} with exactly {question_budget} questions. Each question has: question_id, question_type, prompt, options, answer, evidence_span, difficulty (low, medium or high), purpose, fidelity_score, fidelity_notes."
        ),
        SchemaKind::Reconciliation { total_slides, .. } => format!(
            "Respond with JSON only: one object {{\"revised_slide_actions\": [{{slide_number, action, new_question_budget, reason}}], \"deck_reconciliation_notes\": \"...\", \"uncovered_learning_goals\": [...], \"redundancy_warnings\": [...]}} with exactly one action per slide 1..{total_slides}. keep must repeat the slide's current question_budget; zero_out must use 0."
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_request_is_canonical() {
        let r = ProviderRequest::new(SchemaKind::DeckPlan { total_slides: 3 });
        assert_eq!(r.phase, Phase::DeckSynthesis);
        assert!(r.is_canonical());
        let mut bad = r.clone();
        bad.system_prompt = WINDOW_PLANNER_PROMPT;
        assert!(!bad.is_canonical());
    }

    #[test]
    fn slide_blocks_round_trip() {
        let mut r = ProviderRequest::new(SchemaKind::DeckPlan { total_slides: 3 });
        r.push_text(slide_block(3, "Hello\nWorld"));
        r.push_text(slide_block(4, "  "));
        r.push_text("Slide notes: unrelated");
        assert_eq!(r.slide_blocks(), vec![(3, "Hello\nWorld"), (4, "")]);
    }

    #[test]
    fn context_part_is_recoverable() {
        let ctx = WindowContext {
            window_index: 1,
            start_slide: 5,
            end_slide: 10,
            total_slides: 10,
        };
        let mut r = ProviderRequest::new(SchemaKind::DeckPlan { total_slides: 10 });
        r.push_context(&ctx);
        assert_eq!(r.context::<WindowContext>(), Some(ctx));
    }

    #[test]
    fn repair_appends_one_part() {
        let r = ProviderRequest::new(SchemaKind::DeckPlan { total_slides: 1 });
        let next = r.with_repair(&["a: bad".into(), "b: worse".into()]);
        assert_eq!(next.parts.len(), r.parts.len() + 1);
        let last = next.text_parts().last().unwrap();
        assert!(last.starts_with(REPAIR_HEADER));
        assert!(last.contains("- a: bad\n- b: worse"));
    }
}
