//! The `desmod` command line: text formats for modules, systems and Turing machines,
//! the `check`/`gen`/`validate` subcommands, and report rendering.
//!
//! Exit codes: 0 = property holds (or command succeeded), 1 = property violated,
//! 2 = input or validation error, 3 = state budget exceeded.

mod commands;
pub mod error;
pub mod format;
pub mod io;
pub mod report;

pub use commands::run_command;
pub use error::CliError;
pub use io::{load_system, write_system};
pub use report::{emit_report, Report, FORMAT_VERSION};
