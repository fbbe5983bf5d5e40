//! Deterministic offline stand-in for the model.
//!
//! Every decision is derived from a SHA-256 digest of the seed, the phase and
//! the slide content involved, so equal requests give byte-equal answers in
//! any process. Outputs satisfy the phase validators by construction.
//!
//! Rules:
//! - window planner: role `agenda` when the slide text contains "Agenda" or
//!   "Outline", `title` when it is slide 1 with fewer than 80 characters of
//!   text, `mechanism` otherwise; budget is `hash % 6`, forced to 0 for
//!   title and agenda slides.
//! - deck synthesis: per slide, the candidate with the smallest budget wins
//!   (ties go to the earliest window); sections are runs of five slides.
//! - slide annotator: exactly the requested number of questions, cycling
//!   through the plan's mix; MCQs get four options; fidelity is 4.
//! - reconciliation: `keep` everywhere except `reduce` by one where
//!   `hash % 7 == 0` and the budget is at least 2.

use sha2::{Digest, Sha256};

use super::request::{
    AnnotationContext, Phase, ProviderRequest, ReconciliationContext, SchemaKind, SynthesisContext,
};
use super::structured::PhaseValue;
use super::{Provider, TransportError};
use crate::ingest::normalize_slide_text;
use crate::schema::{
    ActionKind, AnnotationBody, DeckAnalysis, DeckPlan, Difficulty, ModalityType, Question,
    QuestionType, ReconciliationResult, RoleInDeck, SectionPlan, SlideAction, SlideEvaluation,
    SlidePlan, MAX_EVIDENCE_REGIONS, MIN_EVIDENCE_REGIONS,
};

const TITLE_TEXT_LIMIT: usize = 80;
const SECTION_LENGTH: u32 = 5;
const SUMMARY_CHARS: usize = 160;
const MOCK_FIDELITY: u8 = 4;
const MAX_LEARNING_GOALS: usize = 4;

/// Mock content modalities, in hash-selection order.
const MODALITIES: [ModalityType; 5] = [
    ModalityType::Text,
    ModalityType::Diagram,
    ModalityType::ImagePlusText,
    ModalityType::Mixed,
    ModalityType::LayoutAware,
];

const REGION_NAMES: [&str; MAX_EVIDENCE_REGIONS] = [
    "title banner",
    "main bullet list",
    "left figure panel",
    "right figure panel",
    "lower caption strip",
    "footer notes",
];

/// First eight bytes of SHA-256 over the seed, phase and byte fields, each
/// length-prefixed so field boundaries cannot collide.
fn digest(seed: u64, phase: Phase, fields: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(phase.as_str().as_bytes());
    for f in fields {
        h.update((f.len() as u64).to_le_bytes());
        h.update(f);
    }
    let out = h.finalize();
    u64::from_be_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

fn slide_digest(seed: u64, phase: Phase, slide_number: u32, text: &str) -> u64 {
    digest(seed, phase, &[&slide_number.to_le_bytes(), text.as_bytes()])
}

fn truncate_chars(s: &str, max: usize) -> String {
    match s.char_indices().nth(max) {
        Some((i, _)) => format!("{}...", s[..i].trim_end()),
        None => s.to_string(),
    }
}

/// Builds the schema-valid answer for `request`.
pub fn mock_generate(request: &ProviderRequest, seed: u64) -> PhaseValue {
    match &request.expected_schema {
        SchemaKind::WindowPlan { window } => {
            let blocks = request.slide_blocks();
            let plans = window
                .slides()
                .map(|n| {
                    let text = blocks
                        .iter()
                        .find(|(b, _)| *b == n)
                        .map(|(_, t)| *t)
                        .unwrap_or("");
                    plan_slide(seed, n, text)
                })
                .collect();
            PhaseValue::WindowPlan(plans)
        }
        SchemaKind::DeckPlan { total_slides } => {
            let ctx: Option<SynthesisContext> = request.context();
            PhaseValue::DeckPlan(synthesize(*total_slides, ctx))
        }
        SchemaKind::SlideAnnotation {
            slide_number,
            question_budget,
        } => {
            let ctx: Option<AnnotationContext> = request.context();
            let text = request
                .slide_blocks()
                .into_iter()
                .find(|(n, _)| n == slide_number)
                .map(|(_, t)| t.to_string())
                .unwrap_or_default();
            PhaseValue::SlideAnnotation(annotate(
                seed,
                *slide_number,
                *question_budget,
                &text,
                ctx.as_ref(),
            ))
        }
        SchemaKind::Reconciliation {
            total_slides,
            current_budgets,
        } => {
            let ctx: Option<ReconciliationContext> = request.context();
            PhaseValue::Reconciliation(reconcile(seed, *total_slides, current_budgets, ctx))
        }
    }
}

fn plan_slide(seed: u64, slide_number: u32, raw_text: &str) -> SlidePlan {
    let text = normalize_slide_text(raw_text);
    let h = slide_digest(seed, Phase::WindowPlanner, slide_number, &text);
    let title = raw_text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .map(|l| truncate_chars(l, TITLE_TEXT_LIMIT))
        .unwrap_or_else(|| format!("Slide {slide_number}"));

    let role = if text.contains("Agenda") || text.contains("Outline") {
        RoleInDeck::Agenda
    } else if slide_number == 1 && text.chars().count() < TITLE_TEXT_LIMIT {
        RoleInDeck::Title
    } else {
        RoleInDeck::Mechanism
    };
    let budget = match role {
        RoleInDeck::Title | RoleInDeck::Agenda => 0,
        _ => (h % 6) as u8,
    };
    let modality = if text.is_empty() {
        ModalityType::ImagePlusText
    } else if budget == 0 {
        ModalityType::Text
    } else {
        MODALITIES[((h >> 8) % MODALITIES.len() as u64) as usize]
    };
    let question_mix = (0..budget as u64)
        .map(|i| {
            QuestionType::ALL[((h >> 16).wrapping_add(i) % QuestionType::ALL.len() as u64) as usize]
        })
        .collect();
    let eligibility_reason = match (role, budget) {
        (RoleInDeck::Title, _) => "title slide carries no assessable content".to_string(),
        (RoleInDeck::Agenda, _) => "agenda slide only lists upcoming topics".to_string(),
        (_, 0) => "content is too thin for a standalone question".to_string(),
        (_, b) => format!("substantive content supports {b} question(s)"),
    };
    let local_summary = if text.is_empty() {
        format!("Slide {slide_number} has no extractable text.")
    } else {
        truncate_chars(&text, SUMMARY_CHARS)
    };
    SlidePlan {
        slide_number,
        slide_title: title,
        local_summary,
        modality_type: modality,
        role_in_deck: role,
        eligible_for_questions: budget > 0,
        eligibility_reason,
        question_budget: budget,
        question_mix,
    }
}

fn fallback_plan(slide_number: u32) -> SlidePlan {
    SlidePlan {
        slide_number,
        slide_title: format!("Slide {slide_number}"),
        local_summary: format!("Slide {slide_number} had no window candidate."),
        modality_type: ModalityType::Mixed,
        role_in_deck: RoleInDeck::Mechanism,
        eligible_for_questions: false,
        eligibility_reason: "no window candidate available".to_string(),
        question_budget: 0,
        question_mix: Vec::new(),
    }
}

fn synthesize(total_slides: u32, ctx: Option<SynthesisContext>) -> DeckPlan {
    let slides = ctx.map(|c| c.slides).unwrap_or_default();
    let slide_plans: Vec<SlidePlan> = (1..=total_slides)
        .map(|n| {
            slides
                .iter()
                .find(|s| s.slide_number == n)
                .and_then(|s| {
                    s.candidates
                        .iter()
                        .min_by_key(|c| (c.plan.question_budget, c.window_index))
                })
                .map(|c| c.plan.clone())
                .unwrap_or_else(|| fallback_plan(n))
        })
        .collect();

    let topic = slide_plans
        .first()
        .map(|p| p.slide_title.clone())
        .unwrap_or_else(|| "Untitled deck".to_string());
    let mut learning_goals: Vec<String> = slide_plans
        .iter()
        .filter(|p| p.eligible_for_questions)
        .take(MAX_LEARNING_GOALS)
        .map(|p| format!("Explain {}", p.slide_title))
        .collect();
    if learning_goals.is_empty() {
        learning_goals.push(format!("Summarize the main ideas of {topic}"));
    }
    let mut coverage_targets: Vec<String> = Vec::new();
    for p in slide_plans.iter().filter(|p| p.eligible_for_questions) {
        let label = p.modality_type.as_str().to_string();
        if !coverage_targets.contains(&label) {
            coverage_targets.push(label);
        }
    }

    let sections = (0..total_slides.div_ceil(SECTION_LENGTH))
        .map(|i| {
            let start = i * SECTION_LENGTH + 1;
            let end = (start + SECTION_LENGTH - 1).min(total_slides);
            let titles: Vec<&str> = slide_plans[(start - 1) as usize..end as usize]
                .iter()
                .map(|p| p.slide_title.as_str())
                .collect();
            SectionPlan {
                section_id: format!("sec_{}", i + 1),
                start_slide: start,
                end_slide: end,
                section_title: titles[0].to_string(),
                section_summary: format!("Slides {start}-{end}: {}", titles.join("; ")),
            }
        })
        .collect();

    DeckPlan {
        deck_analysis: DeckAnalysis {
            deck_topic: topic,
            target_audience: "mixed".to_string(),
            learning_goals,
            sections,
            coverage_targets,
            global_notes: "Mock synthesis: overlapping candidates resolved by minimum budget."
                .to_string(),
        },
        slide_plans,
    }
}

fn difficulty_for(index: usize, count: usize) -> Difficulty {
    match index * 3 / count.max(1) {
        0 => Difficulty::Low,
        1 => Difficulty::Medium,
        _ => Difficulty::High,
    }
}

fn annotate(
    seed: u64,
    slide_number: u32,
    budget: u8,
    raw_text: &str,
    ctx: Option<&AnnotationContext>,
) -> AnnotationBody {
    let text = normalize_slide_text(raw_text);
    let h = slide_digest(seed, Phase::SlideAnnotator, slide_number, &text);
    let title = ctx
        .map(|c| c.slide_plan.slide_title.clone())
        .unwrap_or_else(|| format!("Slide {slide_number}"));
    let mix: Vec<QuestionType> = ctx
        .map(|c| c.slide_plan.question_mix.clone())
        .unwrap_or_default();

    let mut key_concepts: Vec<String> = raw_text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .skip(1)
        .take(4)
        .map(str::to_string)
        .collect();
    if key_concepts.is_empty() {
        key_concepts.push(title.clone());
    }

    if budget == 0 {
        return AnnotationBody {
            key_concepts,
            evidence_regions: Vec::new(),
            questions: Vec::new(),
            evaluation: SlideEvaluation::unscored("No questions requested for this slide."),
        };
    }

    let span = MAX_EVIDENCE_REGIONS - MIN_EVIDENCE_REGIONS + 1;
    let region_count = MIN_EVIDENCE_REGIONS + (h % span as u64) as usize;
    let evidence_regions: Vec<String> = REGION_NAMES[..region_count]
        .iter()
        .map(|r| r.to_string())
        .collect();

    let count = budget as usize;
    let questions = (0..count)
        .map(|i| {
            let kind = if mix.is_empty() {
                QuestionType::ShortAnswer
            } else {
                mix[i % mix.len()]
            };
            let concept = &key_concepts[i % key_concepts.len()];
            let region = &evidence_regions[i % evidence_regions.len()];
            build_question(
                slide_number,
                i,
                count,
                kind,
                &title,
                concept,
                &key_concepts,
                region,
                h,
            )
        })
        .collect();

    AnnotationBody {
        key_concepts,
        evidence_regions,
        questions,
        evaluation: SlideEvaluation {
            coverage_score: Some(3 + (h % 3) as u8),
            coverage_notes: format!("Questions cover {count} of the slide's main points."),
            scaffolding_score: Some(3 + ((h >> 4) % 3) as u8),
            scaffolding_notes: "Questions progress from recall toward application.".to_string(),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn build_question(
    slide_number: u32,
    index: usize,
    count: usize,
    kind: QuestionType,
    title: &str,
    concept: &str,
    concepts: &[String],
    region: &str,
    h: u64,
) -> Question {
    let (prompt, options, answer) = match kind {
        QuestionType::Mcq => {
            let mut options: Vec<String> = concepts
                .iter()
                .filter(|c| c.as_str() != concept)
                .take(3)
                .cloned()
                .collect();
            let fillers = [
                "None of the above",
                "It is not covered on this slide",
                "All of the above",
            ];
            let mut f = 0;
            while options.len() < 3 {
                options.push(fillers[f].to_string());
                f += 1;
            }
            let pos = ((h >> (8 + index)) % 4) as usize;
            options.insert(pos, concept.to_string());
            (
                format!("Which statement appears on the slide \"{title}\"?"),
                options,
                concept.to_string(),
            )
        }
        QuestionType::Comparison => (
            format!("Compare the idea \"{concept}\" with the rest of \"{title}\"."),
            Vec::new(),
            concept.to_string(),
        ),
        QuestionType::FillBlank => (
            format!("Complete the statement from \"{title}\": ____ ({concept})."),
            Vec::new(),
            concept.to_string(),
        ),
        other => (
            format!("In your own words ({other}), explain: {concept}."),
            Vec::new(),
            concept.to_string(),
        ),
    };
    Question {
        question_id: format!("s{slide_number}_q{}", index + 1),
        question_type: kind,
        prompt,
        options,
        answer,
        evidence_span: format!("{region}: {concept}"),
        difficulty: difficulty_for(index, count),
        purpose: format!("Check understanding of {concept}"),
        fidelity_score: MOCK_FIDELITY,
        fidelity_notes: "Answer is stated directly on the slide.".to_string(),
    }
}

fn reconcile(
    seed: u64,
    total_slides: u32,
    current_budgets: &[u8],
    ctx: Option<ReconciliationContext>,
) -> ReconciliationResult {
    let annotations = ctx
        .as_ref()
        .map(|c| c.annotations.as_slice())
        .unwrap_or(&[]);
    let title_of = |n: u32| {
        annotations
            .iter()
            .find(|a| a.slide_number == n)
            .map(|a| a.slide_title.clone())
            .unwrap_or_default()
    };
    let mut reduced = 0;
    let revised_slide_actions = (1..=total_slides)
        .map(|n| {
            let budget = current_budgets.get(n as usize - 1).copied().unwrap_or(0);
            let h = slide_digest(seed, Phase::Reconciliation, n, &title_of(n));
            if h.is_multiple_of(7) && budget >= 2 {
                reduced += 1;
                SlideAction {
                    slide_number: n,
                    action: ActionKind::Reduce,
                    new_question_budget: budget - 1,
                    reason: "questions overlap with neighboring slides".to_string(),
                }
            } else {
                SlideAction {
                    slide_number: n,
                    action: ActionKind::Keep,
                    new_question_budget: budget,
                    reason: "allocation is consistent with the deck plan".to_string(),
                }
            }
        })
        .collect();

    let mut redundancy_warnings = Vec::new();
    for (i, a) in annotations.iter().enumerate() {
        if let Some(first) = annotations[..i]
            .iter()
            .find(|b| !a.local_summary.is_empty() && b.local_summary == a.local_summary)
        {
            redundancy_warnings.push(format!(
                "Slide {} repeats slide {}",
                a.slide_number, first.slide_number
            ));
        }
    }

    ReconciliationResult {
        revised_slide_actions,
        deck_reconciliation_notes: format!(
            "Reviewed {total_slides} slides; reduced {reduced} allocation(s)."
        ),
        uncovered_learning_goals: Vec::new(),
        redundancy_warnings,
    }
}

/// [`mock_generate`] behind the [`Provider`] trait.
#[derive(Debug, Clone, Default)]
pub struct MockProvider {
    seed: u64,
}

impl MockProvider {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Provider for MockProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<String, TransportError> {
        Ok(mock_generate(request, self.seed).to_wire_json())
    }
}
