use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::vocab::{ActionKind, Difficulty, ModalityType, QuestionType, RoleInDeck};

/// Upper bound shared by plan budgets and reconciliation budgets.
pub const MAX_QUESTION_BUDGET: u8 = 5;
pub const MIN_SCORE: u8 = 1;
pub const MAX_SCORE: u8 = 5;
pub const MCQ_OPTION_COUNT: usize = 4;
pub const MIN_EVIDENCE_REGIONS: usize = 2;
pub const MAX_EVIDENCE_REGIONS: usize = 6;

pub fn slide_id(slide_number: u32) -> String {
    format!("slide_{slide_number:04}")
}

pub fn question_id(slide_number: u32, index: usize) -> String {
    format!("s{slide_number}_q{index}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeckMetadata {
    pub deck_id: String,
    pub deck: Option<String>,
    pub deck_url: Option<String>,
    pub source_file: String,
    pub total_slides: u32,
    pub processed_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionPlan {
    pub section_id: String,
    pub start_slide: u32,
    pub end_slide: u32,
    pub section_title: String,
    pub section_summary: String,
}

impl SectionPlan {
    pub fn contains(&self, slide_number: u32) -> bool {
        (self.start_slide..=self.end_slide).contains(&slide_number)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckAnalysis {
    pub deck_topic: String,
    pub target_audience: String,
    pub learning_goals: Vec<String>,
    pub sections: Vec<SectionPlan>,
    pub coverage_targets: Vec<String>,
    pub global_notes: String,
}

impl DeckAnalysis {
    pub fn section_for(&self, slide_number: u32) -> Option<&SectionPlan> {
        self.sections.iter().find(|s| s.contains(slide_number))
    }
}

/// Per-slide plan produced by window planning and refined by deck synthesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlidePlan {
    pub slide_number: u32,
    pub slide_title: String,
    pub local_summary: String,
    pub modality_type: ModalityType,
    pub role_in_deck: RoleInDeck,
    pub eligible_for_questions: bool,
    pub eligibility_reason: String,
    pub question_budget: u8,
    pub question_mix: Vec<QuestionType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub question_id: String,
    pub question_type: QuestionType,
    pub prompt: String,
    pub options: Vec<String>,
    pub answer: String,
    pub evidence_span: String,
    pub difficulty: Difficulty,
    pub purpose: String,
    pub fidelity_score: u8,
    pub fidelity_notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideEvaluation {
    pub coverage_score: Option<u8>,
    pub coverage_notes: String,
    pub scaffolding_score: Option<u8>,
    pub scaffolding_notes: String,
}

impl SlideEvaluation {
    /// Evaluation for a slide that intentionally carries no questions.
    pub fn unscored(note: &str) -> Self {
        Self {
            coverage_score: None,
            coverage_notes: note.to_string(),
            scaffolding_score: None,
            scaffolding_notes: note.to_string(),
        }
    }

    pub fn is_unscored(&self) -> bool {
        self.coverage_score.is_none() && self.scaffolding_score.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideAnnotation {
    pub slide_id: String,
    pub slide_number: u32,
    pub slide_title: String,
    pub modality_type: ModalityType,
    pub role_in_deck: RoleInDeck,
    pub local_summary: String,
    pub key_concepts: Vec<String>,
    pub evidence_regions: Vec<String>,
    pub eligible_for_questions: bool,
    pub eligibility_reason: String,
    pub question_budget: u8,
    pub question_mix: Vec<QuestionType>,
    pub questions: Vec<Question>,
    pub evaluation: SlideEvaluation,
}

pub(crate) const NO_QUESTIONS_NOTE: &str = "No questions assigned to this slide.";

impl SlideAnnotation {
    /// Builds the annotation for a slide that receives no questions, without
    /// a provider call.
    pub fn unquestioned(plan: &SlidePlan) -> Self {
        Self {
            slide_id: slide_id(plan.slide_number),
            slide_number: plan.slide_number,
            slide_title: plan.slide_title.clone(),
            modality_type: plan.modality_type,
            role_in_deck: plan.role_in_deck,
            local_summary: plan.local_summary.clone(),
            key_concepts: Vec::new(),
            evidence_regions: Vec::new(),
            eligible_for_questions: plan.eligible_for_questions,
            eligibility_reason: plan.eligibility_reason.clone(),
            question_budget: 0,
            question_mix: plan.question_mix.clone(),
            questions: Vec::new(),
            evaluation: SlideEvaluation::unscored(NO_QUESTIONS_NOTE),
        }
    }

    /// Merges a plan with the annotator's output. Question ids are rewritten
    /// to the stable `s{slide}_q{n}` form.
    pub fn from_plan(plan: &SlidePlan, body: AnnotationBody) -> Self {
        let questions = body
            .questions
            .into_iter()
            .enumerate()
            .map(|(i, mut q)| {
                q.question_id = question_id(plan.slide_number, i + 1);
                q
            })
            .collect();
        Self {
            slide_id: slide_id(plan.slide_number),
            slide_number: plan.slide_number,
            slide_title: plan.slide_title.clone(),
            modality_type: plan.modality_type,
            role_in_deck: plan.role_in_deck,
            local_summary: plan.local_summary.clone(),
            key_concepts: body.key_concepts,
            evidence_regions: body.evidence_regions,
            eligible_for_questions: plan.eligible_for_questions,
            eligibility_reason: plan.eligibility_reason.clone(),
            question_budget: plan.question_budget,
            question_mix: plan.question_mix.clone(),
            questions,
            evaluation: body.evaluation,
        }
    }

    /// The plan this annotation currently realizes.
    pub fn plan(&self) -> SlidePlan {
        SlidePlan {
            slide_number: self.slide_number,
            slide_title: self.slide_title.clone(),
            local_summary: self.local_summary.clone(),
            modality_type: self.modality_type,
            role_in_deck: self.role_in_deck,
            eligible_for_questions: self.eligible_for_questions,
            eligibility_reason: self.eligibility_reason.clone(),
            question_budget: self.question_budget,
            question_mix: self.question_mix.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideAction {
    pub slide_number: u32,
    pub action: ActionKind,
    pub new_question_budget: u8,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconciliationResult {
    pub revised_slide_actions: Vec<SlideAction>,
    pub deck_reconciliation_notes: String,
    pub uncovered_learning_goals: Vec<String>,
    pub redundancy_warnings: Vec<String>,
}

/// Root of the emitted annotation document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalDocument {
    pub schema_version: String,
    pub field_descriptions: BTreeMap<String, String>,
    pub deck_metadata: DeckMetadata,
    pub deck_analysis: DeckAnalysis,
    pub reconciliation: ReconciliationResult,
    pub slides: Vec<SlideAnnotation>,
}

// Phase wire types. These are what the model is asked to return.

/// Window planner output: one plan per slide in the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlanOutput {
    pub slides: Vec<SlidePlan>,
}

/// Deck synthesis output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckPlan {
    pub deck_analysis: DeckAnalysis,
    pub slide_plans: Vec<SlidePlan>,
}

/// Slide annotator output; merged with the slide's plan into a
/// [`SlideAnnotation`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationBody {
    pub key_concepts: Vec<String>,
    pub evidence_regions: Vec<String>,
    pub questions: Vec<Question>,
    pub evaluation: SlideEvaluation,
}
