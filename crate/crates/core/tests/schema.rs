mod common;

use common::{arb_document, base_document};
use deckqa_core::schema::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_documents_round_trip(doc in arb_document()) {
        prop_assert!(validate_final_document(&doc).is_ok(), "{:?}", validate_final_document(&doc));
        let text = serialize_document(&doc);
        let back = parse_document(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_document(&back), text);
    }
}

fn rules(doc: &FinalDocument) -> Vec<Rule> {
    validate_final_document(doc)
        .unwrap_err()
        .into_iter()
        .map(|v| v.rule)
        .collect()
}

#[test]
fn base_document_is_valid() {
    let doc = base_document();
    validate_final_document(&doc).unwrap();
    assert_eq!(doc.slides[1].questions[0].question_type, QuestionType::Mcq);
}

#[test]
fn five_option_mcq_is_rejected() {
    let mut doc = base_document();
    doc.slides[1].questions[0].options.push("fifth".into());
    assert_eq!(rules(&doc), vec![Rule::McqHasFourOptions]);
    let text = serialize_document(&doc);
    let err = parse_document(&text).unwrap_err().to_string();
    assert!(err.contains("include exactly 4 options"), "{err}");
}

#[test]
fn fidelity_six_is_rejected() {
    let mut doc = base_document();
    doc.slides[1].questions[1].fidelity_score = 6;
    assert_eq!(rules(&doc), vec![Rule::FidelityRange]);
}

#[test]
fn missing_slide_is_rejected() {
    let mut doc = base_document();
    doc.slides.remove(1);
    assert!(rules(&doc).contains(&Rule::SlidesCoverDeck));
}

#[test]
fn unknown_action_is_rejected_naming_the_vocabulary() {
    let text = serialize_document(&base_document()).replacen(
        "\"action\": \"keep\"",
        "\"action\": \"delete\"",
        1,
    );
    let err = parse_document(&text).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, ParseError::Json { .. }));
    assert!(msg.contains("action must use only these values"), "{msg}");
    assert!(msg.contains("\"zero_out\""), "{msg}");
}

#[test]
fn scores_on_zero_question_slide_are_rejected() {
    let mut doc = base_document();
    doc.slides[0].evaluation.coverage_score = Some(3);
    assert_eq!(rules(&doc), vec![Rule::ScoresNullIffNoQuestions]);
}

#[test]
fn absent_deck_fields_serialize_as_null() {
    let text = serialize_document(&base_document());
    assert!(text.contains("\"deck\": null"));
    assert!(text.contains("\"deck_url\": null"));
}
