use std::collections::BTreeMap;

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Dotted field path -> description, embedded in every emitted document.
const FIELD_DESCRIPTIONS: &[(&str, &str)] = &[
    ("schema_version", "Version of this JSON schema."),
    ("field_descriptions", "Field descriptions mapping"),
    ("deck_metadata.deck_id", "Stable identifier for this deck."),
    ("deck_metadata.deck", "Full academic citation for the deck."),
    ("deck_metadata.deck_url", "Original source URL for the deck, if known."),
    ("deck_metadata.source_file", "Local uploaded PDF filename."),
    ("deck_metadata.total_slides", "Total number of PDF pages processed as slides."),
    ("deck_metadata.processed_at", "UTC timestamp when this JSON was produced."),
    ("deck_analysis.deck_topic", "Short description of the overall topic of the deck."),
    (
        "deck_analysis.target_audience",
        "Estimated audience level; for example undergraduate, graduate, or mixed.",
    ),
    (
        "deck_analysis.learning_goals",
        "List of deck-level learning goals inferred from the slides.",
    ),
    ("deck_analysis.sections", "Contiguous, ordered sections of the deck."),
    (
        "deck_analysis.coverage_targets",
        "Deck-level content targets such as text, diagram, table, chart, layout-aware, or image-plus-text.",
    ),
    (
        "deck_analysis.global_notes",
        "Important global caveats, ambiguities, or observations.",
    ),
    (
        "reconciliation.revised_slide_actions",
        "One action per slide with its new question budget and reason.",
    ),
    (
        "reconciliation.deck_reconciliation_notes",
        "Global notes about redundancy, balancing, and quality adjustments across the deck.",
    ),
    (
        "reconciliation.uncovered_learning_goals",
        "Deck learning goals that remain weakly covered after reconciliation.",
    ),
    (
        "reconciliation.redundancy_warnings",
        "Warnings about overlapping or repeated question sets across slides.",
    ),
    ("slides.slide_id", "Stable identifier for a slide within the deck."),
    (
        "slides.slide_number",
        "1-based slide number corresponding to the PDF page order.",
    ),
    (
        "slides.slide_title",
        "Visible title on the slide if present; otherwise a concise generated title.",
    ),
    (
        "slides.modality_type",
        "Dominant visual form of the slide; for example text, diagram, table, chart, layout-aware, image-plus-text, or mixed.",
    ),
    (
        "slides.role_in_deck",
        "Instructional role of the slide within the deck; for example title, agenda, transition, definition, example, mechanism, result, summary, or appendix.",
    ),
    (
        "slides.local_summary",
        "One- or two-sentence summary of the slide's main instructional content.",
    ),
    (
        "slides.key_concepts",
        "List of key concepts explicitly present on the slide.",
    ),
    (
        "slides.evidence_regions",
        "List of human-readable descriptions of important visible regions on the slide.",
    ),
    (
        "slides.eligible_for_questions",
        "Whether the slide should receive any comprehension questions.",
    ),
    (
        "slides.eligibility_reason",
        "Explanation for why the slide should or should not receive questions.",
    ),
    (
        "slides.question_budget",
        "Recommended number of questions for this slide in deck context.",
    ),
    (
        "slides.question_mix",
        "Recommended mix of question types for this slide.",
    ),
    (
        "slides.questions.question_id",
        "Stable identifier for a question within a slide.",
    ),
    (
        "slides.questions.question_type",
        "Controlled label for the question form or reasoning type.",
    ),
    ("slides.questions.prompt", "Question text shown to the learner."),
    (
        "slides.questions.options",
        "List of answer options for a multiple-choice item; empty otherwise.",
    ),
    (
        "slides.questions.answer",
        "Gold answer or bounded reference answer grounded in the slide.",
    ),
    (
        "slides.questions.evidence_span",
        "Short description of where the answer is visible on the slide.",
    ),
    (
        "slides.questions.difficulty",
        "Relative difficulty label such as low, medium, or high.",
    ),
    (
        "slides.questions.purpose",
        "Instructional purpose such as terminology, relation check, interpretation, or synthesis.",
    ),
    (
        "slides.questions.fidelity_score",
        "1-5 judgment of whether the question is answerable from the slide alone.",
    ),
    (
        "slides.questions.fidelity_notes",
        "Short rationale for the fidelity score.",
    ),
    (
        "slides.evaluation.coverage_score",
        "1-5 score for how well the slide's question bundle covers the slide's important content; null when the slide intentionally has no questions.",
    ),
    (
        "slides.evaluation.coverage_notes",
        "Short rationale for the coverage score.",
    ),
    (
        "slides.evaluation.scaffolding_score",
        "1-5 score for how well the question bundle forms an instructional progression; null when the slide intentionally has no questions.",
    ),
    (
        "slides.evaluation.scaffolding_notes",
        "Short rationale for the scaffolding score.",
    ),
];

pub fn field_descriptions() -> BTreeMap<String, String> {
    FIELD_DESCRIPTIONS
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
