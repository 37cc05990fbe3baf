//! File formats and command implementations behind the `keldysh` binary.

pub mod commands;
pub mod format;

pub use commands::{execute, generate, CliError, Command, Method, Settings};
pub use format::{Field, ProblemFile, ReportFile};
