use std::fmt;
use std::process::ExitCode;

use qclock::ClockError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, counts or configuration files.
    Usage(String),
    /// A singular expression or vanishing denominator stopped the computation.
    Degenerate(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 1,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Degenerate(m) => write!(f, "numeric degeneracy: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ClockError> for CliError {
    fn from(e: ClockError) -> Self {
        match e {
            ClockError::Singular { .. } | ClockError::ZeroDenominator(_) => CliError::Degenerate(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
