//! Scenario runner for the frame engine: loads JSON scenarios, dispatches
//! commands and renders deterministic JSON reports.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;

pub use commands::{run, Cli, Command, Outcome};
pub use error::CliError;
