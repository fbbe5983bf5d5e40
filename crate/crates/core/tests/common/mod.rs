//! Independent oracles, generators and fake providers shared by the
//! integration suites. The oracles restate each rule directly instead of
//! reusing library code paths.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use chrono::{DateTime, TimeZone, Utc};
use image::RgbImage;
use proptest::prelude::*;
use proptest::sample::select;
use unicode_normalization::UnicodeNormalization;

use deckqa_core::heuristics::{RULE_EXACT_DUPLICATE, RULE_TITLE_SLIDE};
use deckqa_core::ingest::{ExtractedDeck, ExtractedSlide};
use deckqa_core::pipeline::{DeckSource, FixedClock, PipelineConfig};
use deckqa_core::provider::{Provider, ProviderConfig, ProviderRequest, TransportError};
use deckqa_core::schema::*;

// ---------------------------------------------------------------- windows

/// Closed form of the window layout: `1 + ceil((total - size) / stride)`
/// windows; all but the last start at `1 + i * stride`, the last ends at
/// `total` with full size.
pub fn expected_windows(total: u32, size: u32, overlap: u32) -> Vec<(u32, u32)> {
    if total <= size {
        return vec![(1, total)];
    }
    let stride = size - overlap;
    let count = 1 + (total - size).div_ceil(stride);
    (0..count)
        .map(|i| {
            if i + 1 == count {
                (total - size + 1, total)
            } else {
                (1 + i * stride, i * stride + size)
            }
        })
        .collect()
}

/// Checks the declared window properties; returns a description of the
/// first failure.
pub fn check_window_properties(
    total: u32,
    size: u32,
    overlap: u32,
    spans: &[(u32, u32)],
) -> Result<(), String> {
    let ctx = format!("total={total} size={size} overlap={overlap}");
    if spans.is_empty() {
        return Err(format!("{ctx}: no windows"));
    }
    if total <= size {
        return if spans == [(1, total)] {
            Ok(())
        } else {
            Err(format!(
                "{ctx}: expected one window [1,{total}], got {spans:?}"
            ))
        };
    }
    let mut covered = vec![false; total as usize + 1];
    for &(s, e) in spans {
        if s < 1 || s > e || e > total {
            return Err(format!("{ctx}: window [{s},{e}] out of bounds"));
        }
        if e - s + 1 != size {
            return Err(format!("{ctx}: window [{s},{e}] is not full size"));
        }
        for n in s..=e {
            covered[n as usize] = true;
        }
    }
    if let Some(n) = (1..=total).find(|&n| !covered[n as usize]) {
        return Err(format!("{ctx}: slide {n} uncovered"));
    }
    let stride = size - overlap;
    for pair in spans.windows(2) {
        let (a, b) = (pair[0].0, pair[1].0);
        if b <= a {
            return Err(format!("{ctx}: starts not increasing: {a} then {b}"));
        }
    }
    for (i, pair) in spans[..spans.len() - 1].windows(2).enumerate() {
        if pair[1].0 - pair[0].0 != stride {
            return Err(format!(
                "{ctx}: stride broken between windows {i} and {}",
                i + 1
            ));
        }
    }
    let last = spans[spans.len() - 1];
    if last != (total - size + 1, total) {
        return Err(format!("{ctx}: final window {last:?} not clamped"));
    }
    if spans.len() >= 2 {
        let prev = spans[spans.len() - 2];
        // The clamped window must be needed: the previous one stops short.
        if prev.1 >= total {
            return Err(format!("{ctx}: redundant final window"));
        }
        if last.0 > prev.0 + stride {
            return Err(format!("{ctx}: gap before final window"));
        }
    }
    Ok(())
}

// ------------------------------------------------------------- heuristics

fn normalized(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    for ch in nfc.chars() {
        if ch.is_whitespace() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
        } else {
            current.push(ch);
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words.join(" ")
}

/// Pairwise restatement of the static rules: a slide whose normalized text
/// is non-empty and equals any earlier slide's is zeroed as a duplicate of
/// the earliest such slide; otherwise a title slide is zeroed.
pub fn heuristics_oracle(plans: &[SlidePlan], texts: &[String]) -> Vec<SlidePlan> {
    let norms: Vec<String> = texts.iter().map(|t| normalized(t)).collect();
    plans
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut out = p.clone();
            let first = (0..i).find(|&j| !norms[i].is_empty() && norms[j] == norms[i]);
            if let Some(j) = first {
                out.question_budget = 0;
                out.eligible_for_questions = false;
                out.eligibility_reason =
                    format!("{RULE_EXACT_DUPLICATE} (same text as slide {})", j + 1);
            } else if p.role_in_deck == RoleInDeck::Title {
                out.question_budget = 0;
                out.eligible_for_questions = false;
                out.eligibility_reason = RULE_TITLE_SLIDE.to_string();
            }
            out
        })
        .collect()
}

pub fn deck_from_texts(texts: &[String]) -> ExtractedDeck {
    ExtractedDeck {
        source_file: "synthetic.pdf".into(),
        slides: texts
            .iter()
            .enumerate()
            .map(|(i, t)| ExtractedSlide {
                slide_number: i as u32 + 1,
                native_text: t.clone(),
                image: RgbImage::new(1, 1),
            })
            .collect(),
        render_scale: 1.0,
    }
}

pub fn plain_plan(n: u32, role: RoleInDeck, budget: u8) -> SlidePlan {
    SlidePlan {
        slide_number: n,
        slide_title: format!("Slide {n}"),
        local_summary: format!("summary {n}"),
        modality_type: ModalityType::Text,
        role_in_deck: role,
        eligible_for_questions: budget > 0,
        eligibility_reason: "planner".into(),
        question_budget: budget,
        question_mix: vec![QuestionType::ShortAnswer; budget as usize],
    }
}

/// Random decks of up to 30 slides drawn from a small text pool so that
/// duplicates (including whitespace and NFC variants) are common.
pub fn arb_heuristic_deck() -> impl Strategy<Value = (Vec<String>, Vec<SlidePlan>)> {
    let pool = vec![
        "Intro".to_string(),
        "Attention\nweights".to_string(),
        "  Attention   weights ".to_string(),
        "Caf\u{e9}".to_string(),
        "Cafe\u{301}".to_string(),
        "Results".to_string(),
        String::new(),
        "   ".to_string(),
        "Summary".to_string(),
        "summary".to_string(),
    ];
    let roles = vec![
        RoleInDeck::Title,
        RoleInDeck::Agenda,
        RoleInDeck::Mechanism,
        RoleInDeck::Example,
        RoleInDeck::Summary,
    ];
    (1usize..=30).prop_flat_map(move |n| {
        let slide = (
            prop_oneof![select(pool.clone()), "[a-z ]{0,12}"],
            select(roles.clone()),
            0u8..=5,
        );
        prop::collection::vec(slide, n).prop_map(|slides| {
            let texts: Vec<String> = slides.iter().map(|(t, _, _)| t.clone()).collect();
            let plans = slides
                .iter()
                .enumerate()
                .map(|(i, (_, role, budget))| plain_plan(i as u32 + 1, *role, *budget))
                .collect();
            (texts, plans)
        })
    })
}

// --------------------------------------------------------- reconciliation

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedReconciled {
    pub budget: u8,
    pub question_count: usize,
    pub scores_null: bool,
    pub eligible: bool,
    pub rerun: bool,
    /// The action's reason must be appended to the eligibility reason.
    pub reason_appended: bool,
}

/// The action rule table: keep is identity; zero_out empties; reduce,
/// expand and rewrite set the clamped budget and schedule a rerun, except a
/// clamped budget of 0 behaves as zero_out.
pub fn reconcile_oracle(
    before: &SlideAnnotation,
    action: ActionKind,
    new_budget: u8,
) -> ExpectedReconciled {
    let clamped = new_budget.min(5);
    let zeroed = ExpectedReconciled {
        budget: 0,
        question_count: 0,
        scores_null: true,
        eligible: false,
        rerun: false,
        reason_appended: true,
    };
    match action {
        ActionKind::Keep => ExpectedReconciled {
            budget: before.question_budget,
            question_count: before.questions.len(),
            scores_null: before.evaluation.coverage_score.is_none(),
            eligible: before.eligible_for_questions,
            rerun: false,
            reason_appended: false,
        },
        ActionKind::ZeroOut => zeroed,
        ActionKind::Reduce | ActionKind::Expand | ActionKind::Rewrite => {
            if clamped == 0 {
                zeroed
            } else {
                ExpectedReconciled {
                    budget: clamped,
                    // Stale until the slide is annotated again.
                    question_count: before.questions.len(),
                    scores_null: before.evaluation.coverage_score.is_none(),
                    eligible: true,
                    rerun: true,
                    reason_appended: false,
                }
            }
        }
    }
}

pub fn sample_question(slide: u32, i: usize, kind: QuestionType) -> Question {
    Question {
        question_id: question_id(slide, i),
        question_type: kind,
        prompt: format!("Prompt {i}"),
        options: if kind == QuestionType::Mcq {
            (0..4).map(|k| format!("option {k}")).collect()
        } else {
            Vec::new()
        },
        answer: "answer".into(),
        evidence_span: "title".into(),
        difficulty: Difficulty::Medium,
        purpose: "recall".into(),
        fidelity_score: 4,
        fidelity_notes: String::new(),
    }
}

/// A valid annotation for `slide` carrying `budget` questions.
pub fn sample_annotation(slide: u32, budget: u8) -> SlideAnnotation {
    let plan = plain_plan(slide, RoleInDeck::Mechanism, budget);
    if budget == 0 {
        return SlideAnnotation::unquestioned(&plan);
    }
    let body = AnnotationBody {
        key_concepts: vec!["concept".into()],
        evidence_regions: vec!["title".into(), "body".into()],
        questions: (1..=budget as usize)
            .map(|i| {
                sample_question(
                    slide,
                    i,
                    if i == 1 {
                        QuestionType::Mcq
                    } else {
                        QuestionType::ShortAnswer
                    },
                )
            })
            .collect(),
        evaluation: SlideEvaluation {
            coverage_score: Some(4),
            coverage_notes: "ok".into(),
            scaffolding_score: Some(4),
            scaffolding_notes: "ok".into(),
        },
    };
    SlideAnnotation::from_plan(&plan, body)
}

// --------------------------------------------------------------- providers

/// Replays a fixed script of responses, then repeats `fallback` forever.
pub struct ScriptedProvider {
    script: Mutex<VecDeque<Result<String, TransportError>>>,
    fallback: Result<String, TransportError>,
    pub requests: Mutex<Vec<ProviderRequest>>,
}

impl ScriptedProvider {
    pub fn new(
        script: Vec<Result<String, TransportError>>,
        fallback: Result<String, TransportError>,
    ) -> Self {
        Self {
            script: Mutex::new(script.into()),
            fallback,
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn always(response: &str) -> Self {
        Self::new(Vec::new(), Ok(response.to_string()))
    }

    pub fn calls(&self) -> usize {
        self.requests.lock().unwrap().len()
    }
}

impl Provider for ScriptedProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<String, TransportError> {
        self.requests.lock().unwrap().push(request.clone());
        self.script
            .lock()
            .unwrap()
            .pop_front()
            .unwrap_or_else(|| self.fallback.clone())
    }
}

// ------------------------------------------------------------ golden run

pub const GOLDEN_SEED: u64 = 7;

pub fn golden_clock() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap()
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/lecture_seed7.json")
}

pub fn mock_config(seed: u64) -> PipelineConfig {
    PipelineConfig {
        provider: ProviderConfig::mock(seed),
        clock: Arc::new(FixedClock(golden_clock())),
        source: DeckSource {
            source_file: "lecture.pdf".into(),
            deck: None,
            deck_url: None,
        },
        ..PipelineConfig::default()
    }
}

// ------------------------------------------------------ document generator

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[A-Za-z0-9 ,.()-]{0,20}",
        1 => "\\PC{0,12}",
        1 => Just("quote \" backslash \\ newline \n tab \t".to_string()),
    ]
}

fn arb_question(slide: u32, index: usize) -> impl Strategy<Value = Question> {
    (
        select(QuestionType::ALL.to_vec()),
        select(Difficulty::ALL.to_vec()),
        1u8..=5,
        (text(), text(), text(), text(), text()),
        prop::collection::vec(text(), 4),
    )
        .prop_map(
            move |(kind, difficulty, fidelity, (prompt, answer, span, purpose, notes), opts)| {
                Question {
                    question_id: question_id(slide, index),
                    question_type: kind,
                    prompt,
                    options: if kind == QuestionType::Mcq {
                        opts
                    } else {
                        Vec::new()
                    },
                    answer,
                    evidence_span: span,
                    difficulty,
                    purpose,
                    fidelity_score: fidelity,
                    fidelity_notes: notes,
                }
            },
        )
}

fn arb_annotation(slide: u32) -> impl Strategy<Value = SlideAnnotation> {
    (0u8..=5, any::<bool>()).prop_flat_map(move |(budget, eligible_flag)| {
        let eligible = budget > 0 || eligible_flag;
        let regions = if budget > 0 {
            prop::collection::vec(text(), 2..=6)
        } else {
            prop::collection::vec(text(), 0..=6)
        };
        let questions: Vec<_> = (1..=budget as usize)
            .map(|i| arb_question(slide, i))
            .collect();
        let evaluation = (1u8..=5, 1u8..=5, text(), text()).prop_map(move |(c, s, cn, sn)| {
            if budget > 0 {
                SlideEvaluation {
                    coverage_score: Some(c),
                    coverage_notes: cn,
                    scaffolding_score: Some(s),
                    scaffolding_notes: sn,
                }
            } else {
                SlideEvaluation::unscored(&cn)
            }
        });
        (
            (
                select(ModalityType::ALL.to_vec()),
                select(RoleInDeck::ALL.to_vec()),
                text(),
                text(),
                text(),
            ),
            prop::collection::vec(text(), 0..4),
            regions,
            prop::collection::vec(select(QuestionType::ALL.to_vec()), 0..=5),
            questions,
            evaluation,
        )
            .prop_map(
                move |(
                    (modality, role, title, summary, reason),
                    concepts,
                    regions,
                    mix,
                    questions,
                    evaluation,
                )| {
                    SlideAnnotation {
                        slide_id: slide_id(slide),
                        slide_number: slide,
                        slide_title: title,
                        modality_type: modality,
                        role_in_deck: role,
                        local_summary: summary,
                        key_concepts: concepts,
                        evidence_regions: regions,
                        eligible_for_questions: eligible,
                        eligibility_reason: reason,
                        question_budget: budget,
                        question_mix: mix,
                        questions,
                        evaluation,
                    }
                },
            )
    })
}

/// Arbitrary documents that satisfy every schema rule.
pub fn arb_document() -> impl Strategy<Value = FinalDocument> {
    (1u32..=12)
        .prop_flat_map(|total| {
            let slides: Vec<_> = (1..=total).map(arb_annotation).collect();
            let cuts = prop::collection::vec(any::<bool>(), (total - 1) as usize);
            let actions = prop::collection::vec(
                (select(ActionKind::ALL.to_vec()), 0u8..=5, text()),
                total as usize,
            );
            let analysis_text = (
                text(),
                text(),
                text(),
                prop::collection::vec(text(), 1..=3),
                prop::collection::vec(text(), 0..3),
            );
            let meta = (
                "[0-9a-f]{12}",
                prop::option::of(text()),
                prop::option::of("https://[a-z]{1,8}\\.edu/[a-z]{1,8}\\.pdf"),
                "[a-z]{1,10}\\.pdf",
                0i64..4_000_000_000,
                0u32..1000,
            );
            let notes = (
                text(),
                prop::collection::vec(text(), 0..3),
                prop::collection::vec(text(), 0..3),
            );
            (
                Just(total),
                slides,
                cuts,
                actions,
                analysis_text,
                meta,
                notes,
            )
        })
        .prop_map(
            |(total, slides, cuts, actions, analysis_text, meta, notes)| {
                let (topic, audience, global_notes, learning_goals, coverage_targets) =
                    analysis_text;
                let mut sections = Vec::new();
                let mut start = 1;
                for n in 1..=total {
                    let cut_after = n == total || cuts[(n - 1) as usize];
                    if cut_after {
                        sections.push(SectionPlan {
                            section_id: format!("sec_{}", sections.len() + 1),
                            start_slide: start,
                            end_slide: n,
                            section_title: format!("Section {}", sections.len() + 1),
                            section_summary: format!("Slides {start} to {n}"),
                        });
                        start = n + 1;
                    }
                }
                let revised_slide_actions = actions
                    .into_iter()
                    .enumerate()
                    .map(|(i, (action, nb, reason))| {
                        let current = slides[i].question_budget;
                        SlideAction {
                            slide_number: i as u32 + 1,
                            action,
                            new_question_budget: match action {
                                ActionKind::Keep => current,
                                ActionKind::ZeroOut => 0,
                                _ => nb,
                            },
                            reason,
                        }
                    })
                    .collect();
                let (deck_id, deck, deck_url, source_file, secs, millis) = meta;
                let (deck_notes, uncovered, redundancy) = notes;
                FinalDocument {
                    schema_version: SCHEMA_VERSION.to_string(),
                    field_descriptions: field_descriptions(),
                    deck_metadata: DeckMetadata {
                        deck_id,
                        deck,
                        deck_url,
                        source_file,
                        total_slides: total,
                        processed_at: Utc.timestamp_opt(secs, millis * 1_000_000).unwrap(),
                    },
                    deck_analysis: DeckAnalysis {
                        deck_topic: topic,
                        target_audience: audience,
                        learning_goals,
                        sections,
                        coverage_targets,
                        global_notes,
                    },
                    reconciliation: ReconciliationResult {
                        revised_slide_actions,
                        deck_reconciliation_notes: deck_notes,
                        uncovered_learning_goals: uncovered,
                        redundancy_warnings: redundancy,
                    },
                    slides,
                }
            },
        )
}

/// A small fixed valid document with one MCQ on slide 2.
pub fn base_document() -> FinalDocument {
    let slides = vec![
        sample_annotation(1, 0),
        sample_annotation(2, 2),
        sample_annotation(3, 1),
    ];
    FinalDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        field_descriptions: field_descriptions(),
        deck_metadata: DeckMetadata {
            deck_id: "0123456789ab".into(),
            deck: None,
            deck_url: None,
            source_file: "base.pdf".into(),
            total_slides: 3,
            processed_at: golden_clock(),
        },
        deck_analysis: DeckAnalysis {
            deck_topic: "Topic".into(),
            target_audience: "students".into(),
            learning_goals: vec!["Goal".into()],
            sections: vec![SectionPlan {
                section_id: "sec_1".into(),
                start_slide: 1,
                end_slide: 3,
                section_title: "All".into(),
                section_summary: "Everything".into(),
            }],
            coverage_targets: vec![],
            global_notes: String::new(),
        },
        reconciliation: ReconciliationResult {
            revised_slide_actions: slides
                .iter()
                .map(|s| SlideAction {
                    slide_number: s.slide_number,
                    action: ActionKind::Keep,
                    new_question_budget: s.question_budget,
                    reason: "fine".into(),
                })
                .collect(),
            deck_reconciliation_notes: String::new(),
            uncovered_learning_goals: vec![],
            redundancy_warnings: vec![],
        },
        slides,
    }
}
