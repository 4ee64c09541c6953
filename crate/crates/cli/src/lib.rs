//! Command-line front end over the `ginidebias` library: measure accuracy
//! inequality, search for corrections, apply them, synthesize test data,
//! and render before/after comparisons.

pub mod args;
pub mod commands;
pub mod config;
pub mod docs;
pub mod error;
pub mod render;

pub use args::Cli;
pub use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    commands::run(cli.command)
}
