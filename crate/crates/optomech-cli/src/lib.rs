//! Harness behind the `optomech` binary: configuration ingestion, figure
//! presets, deterministic CSV output, and the acceptance-suite runner.

pub mod acceptance;
pub mod config;
pub mod output;
pub mod presets;
