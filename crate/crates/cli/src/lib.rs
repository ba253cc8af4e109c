//! Command-line front end: curve inspection, parameter search, sequence
//! generation, analysis reports and lemma verification.

pub mod commands;
pub mod config;
pub mod error;
pub mod search;

pub use error::{CliError, CliResult};
