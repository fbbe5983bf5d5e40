//! Output document model, intermediate phase types and their validators.

mod descriptions;
mod io;
mod types;
mod validate;
mod vocab;

pub use descriptions::{field_descriptions, SCHEMA_VERSION};
pub use io::{parse_document, serialize_document, ParseError};
pub use types::*;
pub use validate::{
    validate_annotation_body, validate_deck_analysis, validate_deck_plan, validate_final_document,
    validate_question, validate_reconciliation, validate_sections, validate_slide_annotation,
    validate_slide_plan, validate_window_plans, Rule, ValidationResult, Violation,
};
pub use vocab::{ActionKind, Difficulty, ModalityType, QuestionType, RoleInDeck, UnknownLabel};
