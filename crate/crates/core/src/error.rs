use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which well-posedness requirement on the input data a scenario violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// The body force must be continuous and solenoidal.
    SolenoidalForcing,
    /// The initial velocity must be solenoidal and vanish on a solid boundary.
    SolenoidalInitialData,
    /// Explicit stepping requires dt below the advective and diffusive limits.
    TimeStepLimit,
    /// Structural parameters (viscosity, horizon, grid) must be admissible.
    Parameters,
}

impl std::fmt::Display for Assumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text = match self {
            Assumption::SolenoidalForcing => "forcing must be solenoidal",
            Assumption::SolenoidalInitialData => {
                "initial data must be solenoidal and vanish on the solid boundary"
            }
            Assumption::TimeStepLimit => "time step exceeds the stability limit",
            Assumption::Parameters => "inadmissible parameter",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has {got} values, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value in field at index {index}")]
    NonFinite { index: usize },

    #[error("right-hand side mean {defect:.3e} exceeds compatibility threshold {threshold:.3e}")]
    CompatibilityViolation { defect: f64, threshold: f64 },

    #[error(
        "iterative solve did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("normal flux {flux:.3e} on the boundary exceeds {threshold:.3e}")]
    BoundaryFluxViolation { flux: f64, threshold: f64 },

    #[error("Courant number {courant:.3} exceeds 0.5 at t = {time}")]
    CflViolation { time: f64, courant: f64 },

    #[error("solution blew up (non-finite values) at t = {time}")]
    BlowUp { time: f64 },

    #[error("invalid scenario ({assumption}): {detail}")]
    Validation {
        assumption: Assumption,
        detail: String,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario '{scenario}' at t = {time}: {source}")]
    Scenario {
        scenario: String,
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(assumption: Assumption, detail: impl Into<String>) -> Self {
        Error::Validation {
            assumption,
            detail: detail.into(),
        }
    }

    /// Strips scenario context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Scenario { source, .. } => source.root(),
            other => other,
        }
    }
}
