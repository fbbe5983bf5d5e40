//! Invariant checks for every schema type.
//!
//! Validators never fail fast: every broken rule is reported as a
//! [`Violation`] carrying the JSON path of the offending field, so the list
//! can be fed back to a model verbatim as a repair hint.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::*;
use super::vocab::{ActionKind, QuestionType};
use crate::windowing::WindowSpec;

/// Named rule broken by a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    TotalSlidesPositive,
    SectionBounds,
    SectionsContiguous,
    LearningGoalsPresent,
    BudgetRange,
    IneligibleHasZeroBudget,
    McqHasFourOptions,
    NonMcqHasNoOptions,
    FidelityRange,
    ScoreRange,
    ScoresNullIffNoQuestions,
    QuestionsMatchBudget,
    EvidenceRegionCount,
    UniqueQuestionIds,
    ZeroOutHasZeroBudget,
    KeepPreservesBudget,
    OneActionPerSlide,
    SlidesCoverDeck,
    PlansCoverWindow,
    SlideNumberMatches,
}

impl Rule {
    /// The human-readable constraint, phrased the way the prompts state it.
    pub fn statement(self) -> &'static str {
        match self {
            Rule::TotalSlidesPositive => "total_slides must be at least 1",
            Rule::SectionBounds => "sections must satisfy 1 <= start_slide <= end_slide <= total_slides",
            Rule::SectionsContiguous => "sections should be contiguous and ordered",
            Rule::LearningGoalsPresent => "learning_goals must not be empty",
            Rule::BudgetRange => "question_budget must be from 0 to 5",
            Rule::IneligibleHasZeroBudget => "slides not eligible for questions must have question_budget 0",
            Rule::McqHasFourOptions => "if a question_type is mcq, include exactly 4 options",
            Rule::NonMcqHasNoOptions => "if a question_type is not mcq, options must be an empty list",
            Rule::FidelityRange => "fidelity_score must be an integer from 1 to 5",
            Rule::ScoreRange => "coverage_score and scaffolding_score must be integers from 1 to 5",
            Rule::ScoresNullIffNoQuestions => "evaluation scores are null when the slide intentionally has no questions, and only then",
            Rule::QuestionsMatchBudget => "generate exactly the assigned question budget",
            Rule::EvidenceRegionCount => "identify 2 to 6 evidence_regions",
            Rule::UniqueQuestionIds => "question_id must be unique within a slide",
            Rule::ZeroOutHasZeroBudget => "zero_out requires new_question_budget 0",
            Rule::KeepPreservesBudget => "keep requires new_question_budget equal to the current budget",
            Rule::OneActionPerSlide => "return exactly one action per slide",
            Rule::SlidesCoverDeck => "slides must cover 1..total_slides, one per slide, in order",
            Rule::PlansCoverWindow => "return exactly one slide plan per slide in the window",
            Rule::SlideNumberMatches => "slide_number must match the requested slide",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({})",
            self.path,
            self.detail,
            self.rule.statement()
        )
    }
}

pub type ValidationResult = Result<(), Vec<Violation>>;

fn finish(out: Vec<Violation>) -> ValidationResult {
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn push(out: &mut Vec<Violation>, path: String, rule: Rule, detail: impl Into<String>) {
    out.push(Violation {
        path,
        rule,
        detail: detail.into(),
    });
}

pub fn validate_question(q: &Question) -> ValidationResult {
    let mut out = Vec::new();
    check_question(q, "question", &mut out);
    finish(out)
}

pub(crate) fn check_question(q: &Question, at: &str, out: &mut Vec<Violation>) {
    if q.question_type == QuestionType::Mcq {
        if q.options.len() != MCQ_OPTION_COUNT {
            push(
                out,
                join(at, "options"),
                Rule::McqHasFourOptions,
                format!(
                    "options: expected exactly {MCQ_OPTION_COUNT}, got {}",
                    q.options.len()
                ),
            );
        }
    } else if !q.options.is_empty() {
        push(
            out,
            join(at, "options"),
            Rule::NonMcqHasNoOptions,
            format!(
                "options must be empty for {} questions, got {}",
                q.question_type,
                q.options.len()
            ),
        );
    }
    if !(MIN_SCORE..=MAX_SCORE).contains(&q.fidelity_score) {
        push(
            out,
            join(at, "fidelity_score"),
            Rule::FidelityRange,
            format!("fidelity_score {} outside 1..5", q.fidelity_score),
        );
    }
}

pub fn validate_slide_plan(plan: &SlidePlan) -> ValidationResult {
    let mut out = Vec::new();
    check_plan(plan, "slide_plan", &mut out);
    finish(out)
}

pub(crate) fn check_plan(plan: &SlidePlan, at: &str, out: &mut Vec<Violation>) {
    check_budget(plan.question_budget, plan.eligible_for_questions, at, out);
}

fn check_budget(budget: u8, eligible: bool, at: &str, out: &mut Vec<Violation>) {
    if budget > MAX_QUESTION_BUDGET {
        push(
            out,
            join(at, "question_budget"),
            Rule::BudgetRange,
            format!("question_budget {budget} outside 0..5"),
        );
    }
    if !eligible && budget != 0 {
        push(
            out,
            join(at, "question_budget"),
            Rule::IneligibleHasZeroBudget,
            format!("eligible_for_questions is false but question_budget is {budget}"),
        );
    }
}

fn check_score(score: Option<u8>, path: String, out: &mut Vec<Violation>) {
    if let Some(s) = score {
        if !(MIN_SCORE..=MAX_SCORE).contains(&s) {
            push(
                out,
                path,
                Rule::ScoreRange,
                format!("score {s} outside 1..5"),
            );
        }
    }
}

pub(crate) fn check_evaluation(
    eval: &SlideEvaluation,
    question_count: usize,
    at: &str,
    out: &mut Vec<Violation>,
) {
    check_score(eval.coverage_score, join(at, "coverage_score"), out);
    check_score(eval.scaffolding_score, join(at, "scaffolding_score"), out);
    let nulls = [eval.coverage_score, eval.scaffolding_score]
        .iter()
        .filter(|s| s.is_none())
        .count();
    if question_count == 0 && nulls != 2 {
        push(
            out,
            at.to_string(),
            Rule::ScoresNullIffNoQuestions,
            "scores must be null when the slide has no questions",
        );
    } else if question_count > 0 && nulls != 0 {
        push(
            out,
            at.to_string(),
            Rule::ScoresNullIffNoQuestions,
            format!("scores must be present when the slide has {question_count} questions"),
        );
    }
}

/// Checks an annotator body against the budget it was asked to realize.
pub fn validate_annotation_body(body: &AnnotationBody, question_budget: u8) -> ValidationResult {
    let mut out = Vec::new();
    check_body(
        &body.questions,
        &body.evidence_regions,
        &body.evaluation,
        question_budget,
        "",
        &mut out,
    );
    finish(out)
}

fn check_body(
    questions: &[Question],
    evidence_regions: &[String],
    evaluation: &SlideEvaluation,
    budget: u8,
    at: &str,
    out: &mut Vec<Violation>,
) {
    if questions.len() != budget as usize {
        push(
            out,
            join(at, "questions"),
            Rule::QuestionsMatchBudget,
            format!("expected {budget} questions, got {}", questions.len()),
        );
    }
    if budget >= 1
        && !(MIN_EVIDENCE_REGIONS..=MAX_EVIDENCE_REGIONS).contains(&evidence_regions.len())
    {
        push(
            out,
            join(at, "evidence_regions"),
            Rule::EvidenceRegionCount,
            format!(
                "expected 2..6 evidence_regions, got {}",
                evidence_regions.len()
            ),
        );
    }
    let mut seen = HashSet::new();
    for (i, q) in questions.iter().enumerate() {
        let qat = join(at, &format!("questions[{i}]"));
        check_question(q, &qat, out);
        if !seen.insert(q.question_id.as_str()) {
            push(
                out,
                join(&qat, "question_id"),
                Rule::UniqueQuestionIds,
                format!("duplicate question_id {:?}", q.question_id),
            );
        }
    }
    check_evaluation(evaluation, questions.len(), &join(at, "evaluation"), out);
}

pub fn validate_slide_annotation(a: &SlideAnnotation) -> ValidationResult {
    let mut out = Vec::new();
    check_annotation(a, "slide", &mut out);
    finish(out)
}

pub(crate) fn check_annotation(a: &SlideAnnotation, at: &str, out: &mut Vec<Violation>) {
    check_budget(a.question_budget, a.eligible_for_questions, at, out);
    check_body(
        &a.questions,
        &a.evidence_regions,
        &a.evaluation,
        a.question_budget,
        at,
        out,
    );
}

pub fn validate_sections(sections: &[SectionPlan], total_slides: u32) -> ValidationResult {
    let mut out = Vec::new();
    check_sections(sections, total_slides, "sections", &mut out);
    finish(out)
}

fn check_sections(sections: &[SectionPlan], total: u32, at: &str, out: &mut Vec<Violation>) {
    if sections.is_empty() {
        push(
            out,
            at.to_string(),
            Rule::SectionsContiguous,
            "at least one section is required",
        );
        return;
    }
    let mut expected_start = 1u32;
    for (i, s) in sections.iter().enumerate() {
        let sat = format!("{at}[{i}]");
        if !(1 <= s.start_slide && s.start_slide <= s.end_slide && s.end_slide <= total) {
            push(
                out,
                sat.clone(),
                Rule::SectionBounds,
                format!(
                    "section [{}, {}] outside 1..{total} or reversed",
                    s.start_slide, s.end_slide
                ),
            );
        }
        if s.start_slide != expected_start {
            push(
                out,
                join(&sat, "start_slide"),
                Rule::SectionsContiguous,
                format!(
                    "expected start_slide {expected_start}, got {}",
                    s.start_slide
                ),
            );
        }
        expected_start = s.end_slide.saturating_add(1);
    }
    let last = sections.last().map(|s| s.end_slide).unwrap_or(0);
    if last != total {
        push(
            out,
            format!("{at}[{}].end_slide", sections.len() - 1),
            Rule::SectionsContiguous,
            format!("last section must end at slide {total}, ends at {last}"),
        );
    }
}

pub fn validate_deck_analysis(analysis: &DeckAnalysis, total_slides: u32) -> ValidationResult {
    let mut out = Vec::new();
    check_analysis(analysis, total_slides, "deck_analysis", &mut out);
    finish(out)
}

fn check_analysis(a: &DeckAnalysis, total: u32, at: &str, out: &mut Vec<Violation>) {
    if a.learning_goals.is_empty() {
        push(
            out,
            join(at, "learning_goals"),
            Rule::LearningGoalsPresent,
            "learning_goals is empty",
        );
    }
    check_sections(&a.sections, total, &join(at, "sections"), out);
}

/// Checks that `numbers` is exactly `expected` in order.
fn check_numbering(
    numbers: impl Iterator<Item = u32>,
    expected: std::ops::RangeInclusive<u32>,
    rule: Rule,
    at: &str,
    out: &mut Vec<Violation>,
) {
    let got: Vec<u32> = numbers.collect();
    let want: Vec<u32> = expected.clone().collect();
    if got != want {
        let got_set: HashSet<u32> = got.iter().copied().collect();
        let missing: Vec<u32> = want
            .iter()
            .copied()
            .filter(|n| !got_set.contains(n))
            .collect();
        let mut seen = HashSet::new();
        let dupes: Vec<u32> = got.iter().copied().filter(|n| !seen.insert(*n)).collect();
        let extra: Vec<u32> = got
            .iter()
            .copied()
            .filter(|n| !expected.contains(n))
            .collect();
        let mut detail = format!(
            "expected slide numbers {}..{} in order",
            expected.start(),
            expected.end()
        );
        if !missing.is_empty() {
            detail.push_str(&format!("; missing {missing:?}"));
        }
        if !dupes.is_empty() {
            detail.push_str(&format!("; duplicated {dupes:?}"));
        }
        if !extra.is_empty() {
            detail.push_str(&format!("; out of range {extra:?}"));
        }
        push(out, at.to_string(), rule, detail);
    }
}

/// Validates window planner output against the window it was asked about.
pub fn validate_window_plans(plans: &[SlidePlan], window: &WindowSpec) -> ValidationResult {
    let mut out = Vec::new();
    check_numbering(
        plans.iter().map(|p| p.slide_number),
        window.start_slide..=window.end_slide,
        Rule::PlansCoverWindow,
        "slides",
        &mut out,
    );
    for (i, p) in plans.iter().enumerate() {
        check_plan(p, &format!("slides[{i}]"), &mut out);
    }
    finish(out)
}

pub fn validate_deck_plan(plan: &DeckPlan, total_slides: u32) -> ValidationResult {
    let mut out = Vec::new();
    check_analysis(&plan.deck_analysis, total_slides, "deck_analysis", &mut out);
    check_numbering(
        plan.slide_plans.iter().map(|p| p.slide_number),
        1..=total_slides,
        Rule::SlidesCoverDeck,
        "slide_plans",
        &mut out,
    );
    for (i, p) in plan.slide_plans.iter().enumerate() {
        check_plan(p, &format!("slide_plans[{i}]"), &mut out);
    }
    finish(out)
}

/// Validates a reconciliation result for a deck of `total_slides`.
///
/// `current_budgets[i]` is the budget of slide `i + 1` the `keep` rule is
/// checked against; pass `None` to skip that cross-check.
pub fn validate_reconciliation(
    result: &ReconciliationResult,
    total_slides: u32,
    current_budgets: Option<&[u8]>,
) -> ValidationResult {
    let mut out = Vec::new();
    check_reconciliation(
        result,
        total_slides,
        current_budgets,
        "reconciliation",
        &mut out,
    );
    finish(out)
}

fn check_reconciliation(
    r: &ReconciliationResult,
    total: u32,
    current_budgets: Option<&[u8]>,
    at: &str,
    out: &mut Vec<Violation>,
) {
    let actions_at = join(at, "revised_slide_actions");
    let mut numbers: Vec<u32> = r
        .revised_slide_actions
        .iter()
        .map(|a| a.slide_number)
        .collect();
    numbers.sort_unstable();
    check_numbering(
        numbers.into_iter(),
        1..=total,
        Rule::OneActionPerSlide,
        &actions_at,
        out,
    );
    for (i, a) in r.revised_slide_actions.iter().enumerate() {
        let aat = format!("{actions_at}[{i}].new_question_budget");
        if a.new_question_budget > MAX_QUESTION_BUDGET {
            push(
                out,
                aat.clone(),
                Rule::BudgetRange,
                format!("new_question_budget {} outside 0..5", a.new_question_budget),
            );
        }
        match a.action {
            ActionKind::ZeroOut if a.new_question_budget != 0 => push(
                out,
                aat,
                Rule::ZeroOutHasZeroBudget,
                format!(
                    "zero_out with new_question_budget {}",
                    a.new_question_budget
                ),
            ),
            ActionKind::Keep => {
                let current = current_budgets
                    .and_then(|b| b.get((a.slide_number as usize).wrapping_sub(1)).copied());
                if let Some(current) = current {
                    if current != a.new_question_budget {
                        push(
                            out,
                            aat,
                            Rule::KeepPreservesBudget,
                            format!(
                                "keep on slide {} changes budget {current} -> {}",
                                a.slide_number, a.new_question_budget
                            ),
                        );
                    }
                }
            }
            _ => {}
        }
    }
}

pub fn validate_final_document(doc: &FinalDocument) -> ValidationResult {
    let mut out = Vec::new();
    let total = doc.deck_metadata.total_slides;
    if total < 1 {
        push(
            &mut out,
            "deck_metadata.total_slides".into(),
            Rule::TotalSlidesPositive,
            "total_slides is 0",
        );
    }
    check_analysis(&doc.deck_analysis, total, "deck_analysis", &mut out);
    check_numbering(
        doc.slides.iter().map(|s| s.slide_number),
        1..=total,
        Rule::SlidesCoverDeck,
        "slides",
        &mut out,
    );
    for (i, s) in doc.slides.iter().enumerate() {
        check_annotation(s, &format!("slides[{i}]"), &mut out);
    }
    // In the final document each slide already carries its post-action
    // budget, so `keep` is checked against it.
    let budgets: Option<Vec<u8>> = if doc.slides.len() == total as usize
        && doc
            .slides
            .iter()
            .enumerate()
            .all(|(i, s)| s.slide_number as usize == i + 1)
    {
        Some(doc.slides.iter().map(|s| s.question_budget).collect())
    } else {
        None
    };
    check_reconciliation(
        &doc.reconciliation,
        total,
        budgets.as_deref(),
        "reconciliation",
        &mut out,
    );
    finish(out)
}
