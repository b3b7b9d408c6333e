use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("matrix is not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {diff:e} exceeds {tol:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        diff: f64,
        tol: f64,
    },

    #[error("eigen/singular value iteration did not converge")]
    ConvergenceFailure,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("principal angles require two nonempty subspaces")]
    EmptySubspace,

    #[error("{what} is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotPositiveSemidefinite {
        what: &'static str,
        eigenvalue: f64,
        tol: f64,
    },

    #[error("constraint block is rank deficient: sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e}")]
    RankDeficientB { sigma_min: f64, sigma_max: f64 },

    #[error("saddle-point matrix is numerically singular: |lambda| = {smallest:e} <= {threshold:e}")]
    SingularK { smallest: f64, threshold: f64 },

    #[error("augmented leading block is singular: mu_min = {mu_min:e} <= {threshold:e}")]
    AugmentedBlockSingular { mu_min: f64, threshold: f64 },

    #[error("augmented saddle-point matrix is numerically singular")]
    SingularAugmented,

    #[error("bound requires rank(A) = n - m = {expected}, found rank {found}")]
    RankAssumptionViolated { expected: usize, found: usize },

    #[error("rank(A) = {found} < n - m = {required}; the saddle-point matrix is necessarily singular")]
    RankTooLow { required: usize, found: usize },

    #[error("minimum principal angle {theta:e} is within angle tolerance {tol:e}; no finite optimal gamma")]
    ZeroAngle { theta: f64, tol: f64 },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("infeasible dimensions: {0}")]
    InfeasibleDimensions(String),

    #[error("problem generation failed after {attempts} attempts: {last}")]
    GenerationFailed { attempts: usize, last: String },

    #[error("oracle size cap exceeded: n + m = {size} > {cap}")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("structure error ({invariant}): {message}")]
    Structure {
        invariant: &'static str,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Coarse classification used for process exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::SizeCapExceeded { .. } => ErrorCategory::SizeCap,
            Error::Parse { .. }
            | Error::Structure { .. }
            | Error::Io { .. }
            | Error::Json(_)
            | Error::NonFinite
            | Error::NotSymmetric { .. }
            | Error::DimensionMismatch(_)
            | Error::NotPositiveSemidefinite { .. }
            | Error::RankDeficientB { .. }
            | Error::SingularK { .. }
            | Error::ParameterOutOfRange(_)
            | Error::InfeasibleDimensions(_)
            | Error::GenerationFailed { .. } => ErrorCategory::Input,
            _ => ErrorCategory::Computation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    SizeCap,
    Computation,
}
