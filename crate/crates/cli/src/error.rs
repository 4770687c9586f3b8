use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for --{flag}: {message}")]
    Validation { flag: String, message: String },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot write to standard output: {0}")]
    Stdout(io::Error),
}

impl CliError {
    pub fn validation(flag: &str, message: impl Into<String>) -> Self {
        CliError::Validation {
            flag: flag.to_string(),
            message: message.into(),
        }
    }

    /// Validation error for a library rejection, naming the flag that fed it.
    /// `fallback` is used for errors that are not about a single parameter.
    pub fn from_core(err: kmittag::Error, fallback: &str) -> Self {
        let flag = err.parameter().map(flag_for).unwrap_or(fallback);
        Self::validation(flag, err.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::NoConvergence(_) => 3,
            CliError::VerificationFailed(_) => 4,
            CliError::Write { .. } | CliError::Stdout(_) => 1,
        }
    }
}

/// Library parameter names to command-line flags.
fn flag_for(parameter: &'static str) -> &'static str {
    match parameter {
        "q" => "tau",
        "t" | "t_max" => "t-max",
        "outer_tol" => "outer-tol",
        "inner_tol" => "inner-tol",
        "outer_max_terms" => "outer-tol",
        other => other,
    }
}

pub type CliResult<T> = Result<T, CliError>;
