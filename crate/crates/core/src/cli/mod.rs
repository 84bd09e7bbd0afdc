//! File formats, reports and command implementations behind the `rifle`
//! binary.

pub mod commands;
pub mod format;
pub mod generate;
pub mod report;

pub use commands::{cmd_gen, cmd_lattice, cmd_nondegen, cmd_oracle, cmd_solve, cmd_verify, CliError, CommandOutput};
pub use format::{parse_instance, parse_outcome, write_instance, OutcomeDoc, ParseError};
pub use generate::{random_instance, GenParams};
pub use report::ReportDocument;
