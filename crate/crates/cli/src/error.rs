use std::fmt;
use std::process::ExitCode;

use ncx_core::{EmbeddingError, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    User,
    Solver,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn user(e: impl fmt::Display) -> Self {
        CliError {
            kind: Kind::User,
            message: e.to_string(),
        }
    }

    pub fn solver(e: impl fmt::Display) -> Self {
        CliError {
            kind: Kind::Solver,
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self.kind {
            Kind::User => ExitCode::from(2),
            Kind::Solver => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Bad input surfaces as a fragment or cone error; anything from the solver
/// or the certificate checks is a solver failure.
impl From<EmbeddingError> for CliError {
    fn from(e: EmbeddingError) -> Self {
        match e {
            EmbeddingError::Fragment(_) | EmbeddingError::Cone(_) | EmbeddingError::Assembly(_) => {
                CliError::user(e)
            }
            EmbeddingError::Lp(_)
            | EmbeddingError::InternalConsistency(_)
            | EmbeddingError::CertificateCorruption(_) => CliError::solver(e),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::user(e)
    }
}
