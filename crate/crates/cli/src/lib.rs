//! Command-line front end: JSON configuration in, CSV tables and JSON
//! summaries out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod strategy;

pub use commands::{dispatch, Command};
pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use report::Report;
