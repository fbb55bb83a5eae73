//! Command-line front end for `probe-core`: scatter and boundary runs,
//! single-state reports, self-verification and moment bounds.

pub mod commands;
pub mod error;
pub mod format;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
