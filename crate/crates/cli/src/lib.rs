//! Reports, file formats and the command-line surface for `qnr-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod stats;

pub use config::{OutputFormat, RunConfig};
pub use error::CliError;
