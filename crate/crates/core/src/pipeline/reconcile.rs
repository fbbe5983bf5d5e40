use std::collections::{BTreeSet, HashMap};

use crate::schema::{
    ActionKind, ReconciliationResult, SlideAnnotation, SlideEvaluation, MAX_QUESTION_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReconcileError {
    #[error("reconciliation names slide {0}, which is not in the deck")]
    UnknownSlide(u32),
    #[error("reconciliation has more than one action for slide {0}")]
    DuplicateAction(u32),
}

pub(crate) const ZERO_OUT_NOTE: &str = "Questions removed during reconciliation.";

fn zero_out(a: &mut SlideAnnotation, action: ActionKind, reason: &str) {
    a.question_budget = 0;
    a.questions.clear();
    a.evaluation = SlideEvaluation::unscored(ZERO_OUT_NOTE);
    a.eligible_for_questions = false;
    a.eligibility_reason = format!(
        "{}; reconciliation {action}: {reason}",
        a.eligibility_reason
    );
}

/// Applies one action per slide.
///
/// `keep` leaves the slide alone. `zero_out`, and any other action whose
/// clamped budget is 0, removes the questions and nulls the scores. `reduce`,
/// `expand` and `rewrite` set the new budget (clamped to 0..5) and put the
/// slide in the returned rerun set; its questions are stale until it is
/// annotated again. Slides without an action are kept.
pub fn apply_reconciliation(
    annotations: &[SlideAnnotation],
    result: &ReconciliationResult,
) -> Result<(Vec<SlideAnnotation>, BTreeSet<u32>), ReconcileError> {
    let index: HashMap<u32, usize> = annotations
        .iter()
        .enumerate()
        .map(|(i, a)| (a.slide_number, i))
        .collect();
    let mut out = annotations.to_vec();
    let mut rerun = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for action in &result.revised_slide_actions {
        let &i = index
            .get(&action.slide_number)
            .ok_or(ReconcileError::UnknownSlide(action.slide_number))?;
        if !seen.insert(action.slide_number) {
            return Err(ReconcileError::DuplicateAction(action.slide_number));
        }
        let a = &mut out[i];
        let budget = action.new_question_budget.min(MAX_QUESTION_BUDGET);
        match action.action {
            ActionKind::Keep => {}
            ActionKind::ZeroOut => zero_out(a, action.action, &action.reason),
            kind if budget == 0 => zero_out(a, kind, &action.reason),
            _ => {
                a.question_budget = budget;
                a.eligible_for_questions = true;
                rerun.insert(action.slide_number);
            }
        }
    }
    Ok((out, rerun))
}
