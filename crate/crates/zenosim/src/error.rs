//! Error type shared by all simulator modules.

use thiserror::Error;

/// Errors produced by simulator operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A generator or operator that must be Hermitian is not.
    #[error("matrix is not Hermitian: |M[{row}][{col}] - conj(M[{col}][{row}])| = {defect:.3e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },

    /// NaN or infinite entry where a finite one is required.
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A matrix failed the density-matrix validity checks.
    #[error(
        "not a valid density matrix: hermiticity defect {hermiticity:.3e}, \
         trace defect {trace:.3e}, min eigenvalue {min_eigenvalue:.3e}"
    )]
    InvalidDensity {
        hermiticity: f64,
        trace: f64,
        min_eigenvalue: f64,
    },

    #[error("state vector norm deviates from 1 by {defect:.3e}")]
    NotNormalized { defect: f64 },

    /// Both Rabi frequencies vanish, so the recurrence period is undefined.
    #[error("recurrence time undefined: both Rabi frequencies are zero")]
    UndefinedRecurrence,

    #[error("invalid {what}: {constraint}")]
    InvalidInput { what: String, constraint: String },

    #[error("grid is not strictly increasing at index {index}")]
    UnsortedGrid { index: usize },

    #[error("curves are defined on different grids")]
    GridMismatch,

    #[error(
        "integration step {step:.3e} is too coarse for rate bumps of width {width:.3e} \
         (need step <= width / 10)"
    )]
    StepTooCoarse { step: f64, width: f64 },

    /// The integrator let a state quantity drift past a hard accuracy limit.
    #[error("integration accuracy failure: {quantity} reached {value:.3e}, limit {limit:.1e}")]
    AccuracyFailure {
        quantity: &'static str,
        value: f64,
        limit: f64,
    },

    /// A survival probability came out with a non-negligible imaginary part.
    #[error("survival probability has imaginary part {imag:.3e} above tolerance")]
    ComplexSurvival { imag: f64 },

    #[error("config error: {field}: {constraint}")]
    Config { field: String, constraint: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of numerical accuracy, as opposed to invalid input.
    /// The command-line front end exits with a distinct code for these.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::AccuracyFailure { .. } | Error::ComplexSurvival { .. }
        )
    }

    pub(crate) fn invalid_input(what: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::InvalidInput {
            what: what.into(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}
