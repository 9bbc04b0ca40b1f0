//! Command-line front end for the `gramheight` library: option parsing,
//! CSV family ingestion and deterministic JSON/CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;

pub use commands::{execute, run, Outcome};
pub use config::{parse_config, RunConfig};
pub use error::{exit, CliError};
