use super::types::FinalDocument;
use super::validate::{validate_final_document, Violation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("invalid document JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("document violates schema: {}", summarize(.0))]
    Schema(Vec<Violation>),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Pretty-printed UTF-8 JSON with keys in schema order and a trailing newline.
pub fn serialize_document(doc: &FinalDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serialization is infallible");
    text.push('\n');
    text
}

/// Parses and validates a document. Vocabulary and type errors carry the
/// line and column; invariant violations carry a JSON path per violation.
pub fn parse_document(text: &str) -> Result<FinalDocument, ParseError> {
    let doc: FinalDocument = serde_json::from_str(text)?;
    validate_final_document(&doc).map_err(ParseError::Schema)?;
    Ok(doc)
}
