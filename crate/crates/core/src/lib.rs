//! Slide-deck question generation: ingest a PDF lecture deck, plan and
//! annotate every slide through a model provider, and compile one
//! validated JSON document.

pub mod heuristics;
pub mod ingest;
pub mod pipeline;
pub mod provider;
pub mod schema;
pub mod synthetic;
pub mod windowing;
