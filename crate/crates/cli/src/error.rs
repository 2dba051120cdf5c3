use morrey_core::analysis::AnalysisError;
use morrey_core::extremal1d::Extremal1dError;
use morrey_core::seminorm::SeminormError;
use morrey_core::solver::SolverError;
use morrey_core::{FieldError, MeasureError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input that parses but violates a core invariant.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("{0} verification check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::ChecksFailed(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::ExponentTooSmall { .. } => CliError::Config(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<Extremal1dError> for CliError {
    fn from(e: Extremal1dError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SeminormError> for CliError {
    fn from(e: SeminormError) -> Self {
        match e {
            SeminormError::EmptySearchConfig(_) => CliError::Config(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::MaxIterations { .. } | SolverError::ConstraintDegenerate { .. } => {
                CliError::NonConvergence(e.to_string())
            }
            SolverError::InvalidGrid(_)
            | SolverError::AtomOutsideBox { .. }
            | SolverError::UnsupportedDimension(_) => CliError::Config(e.to_string()),
            SolverError::Field(f) => f.into(),
            SolverError::Seminorm(s) => s.into(),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Solver(s) => s.into(),
            AnalysisError::Seminorm(s) => s.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
