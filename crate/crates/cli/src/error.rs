use std::path::PathBuf;

use thiserror::Error;

/// Exit code for usage, I/O and input-format errors.
pub const EXIT_USAGE: u8 = 1;
/// Exit code for a computation whose result did not verify.
pub const EXIT_VERIFICATION: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Solver(#[from] schurkit::Error),
}

impl CliError {
    /// Inputs violating an operation's preconditions count as usage errors;
    /// numerical failures count as verification failures.
    pub fn exit_code(&self) -> u8 {
        use schurkit::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Solver(e) => match e {
                E::ShapeMismatch { .. }
                | E::NotSquare { .. }
                | E::NotHermitian { .. }
                | E::NotPsd { .. }
                | E::InvalidArgument(_) => EXIT_USAGE,
                E::NoConvergence { .. }
                | E::SingularHessian
                | E::Lp(_)
                | E::SupportViolation { .. }
                | E::Verification(_) => EXIT_VERIFICATION,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_separate_bad_input_from_failed_verification() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
        let bad_input = schurkit::Error::NotSquare { rows: 2, cols: 3 };
        assert_eq!(CliError::from(bad_input).exit_code(), EXIT_USAGE);
        let numerical = schurkit::Error::NoConvergence {
            what: "barrier",
            iterations: 1,
        };
        assert_eq!(CliError::from(numerical).exit_code(), EXIT_VERIFICATION);
        let unverified = schurkit::Error::Verification("x".into());
        assert_eq!(CliError::from(unverified).exit_code(), EXIT_VERIFICATION);
    }
}
