//! Command-line harness for the `skinlayer` library.
//!
//! Each command returns an [`Outcome`] holding its report and artifacts;
//! the binary writes the artifacts in one pass at the end.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{cmd_curl_check, cmd_decay_check, cmd_profiles_check, cmd_rates, cmd_symbol_check};
pub use config::{Overrides, RunConfig};
pub use report::Outcome;
