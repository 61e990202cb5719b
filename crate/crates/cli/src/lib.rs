//! Command-line front end for the `schurkit` library: matrix file I/O and
//! the `norm`, `factorize`, `certify`, `check` and `gen` subcommands.
//!
//! Exit codes: 0 when every verification passes, 2 when a result fails to
//! verify, 1 for usage, I/O and input-format errors.

mod commands;
pub mod error;
pub mod matrix_file;
pub mod report;

pub use commands::{run, Cli, Command, MIN_TOL, SEED_ENV};
pub use error::{CliError, EXIT_USAGE, EXIT_VERIFICATION};
pub use matrix_file::MatrixFile;
