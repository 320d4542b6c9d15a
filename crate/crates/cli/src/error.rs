use thiserror::Error;

use oblique_core::perturb::PerturbError;
use oblique_core::solver::SolverError;
use oblique_core::stability::StabilityError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed configuration, inadmissible input.
    #[error("configuration: {0}")]
    Config(String),
    /// Numerical or I/O failure after the configuration was accepted.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Runtime(format!("i/o: {e}"))
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::InvalidConfig(_) | SolverError::Swe(_) => Self::Config(e.to_string()),
            _ => Self::Runtime(e.to_string()),
        }
    }
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        match e {
            PerturbError::Matrix(_) | PerturbError::RepeatedEigenvalues { .. } | PerturbError::StepOutOfRange(_) => {
                Self::Config(e.to_string())
            }
            _ => Self::Runtime(e.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Matrix(_)
            | StabilityError::InvalidGamma(_)
            | StabilityError::InvalidGrid(_)
            | StabilityError::Precondition(_) => Self::Config(e.to_string()),
            StabilityError::Perturb(p) => p.into(),
            _ => Self::Runtime(e.to_string()),
        }
    }
}
