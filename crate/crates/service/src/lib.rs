//! Command-line and HTTP front ends for the deck annotation pipeline.

pub mod cli;
pub mod fetch;
pub mod request;
pub mod server;
