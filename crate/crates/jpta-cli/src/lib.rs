//! Implementation of the `jpta` command-line tool: beam design, Monte Carlo
//! evaluation, the scheduling simulation sweep, and SVG plotting.

pub mod commands;
pub mod config;
pub mod formats;
pub mod plot;

/// A diagnostic plus the process exit code it maps to: 2 for usage and
/// validation problems, 3 for solver numeric failures.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        Self { message, code: 2 }
    }

    pub fn numeric(message: String) -> Self {
        Self { message, code: 3 }
    }
}

impl From<jpta::JptaError> for CliError {
    fn from(e: jpta::JptaError) -> Self {
        match e {
            jpta::JptaError::NumericFailure(_) => Self::numeric(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}
