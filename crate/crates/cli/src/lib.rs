//! Library side of the `pencil` binary: document formats, reports and the
//! subcommands, kept here so they can be tested without spawning processes.

pub mod commands;
pub mod document;
pub mod error;
pub mod report;

pub use error::CliError;
