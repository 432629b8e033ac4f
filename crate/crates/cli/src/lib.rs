//! Batch front end: configuration parsing, subcommands and SVG output.

pub mod commands;
pub mod config;
pub mod svg;

/// Environment variable holding the number of worker threads.
pub const THREADS_ENV: &str = "EVIDENCE_THREADS";
