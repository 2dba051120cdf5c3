//! The `morrey` command-line tool: measure files in, JSON or CSV reports out.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod report;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
