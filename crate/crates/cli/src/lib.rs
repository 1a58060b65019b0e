//! Command-line front end: automaton files, Turing cells, simulation and the
//! law checks.

pub mod cell;
pub mod commands;
pub mod error;
pub mod file;
pub mod simulate;

pub use commands::run;
pub use error::{CliError, CliResult};
