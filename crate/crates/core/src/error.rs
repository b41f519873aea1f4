use thiserror::Error;

/// Errors raised by the spectral toolkit.
///
/// Input problems (bad coefficient documents, out-of-range parameters)
/// are separated from numerical failures so the command-line front end
/// can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient spec: {0}")]
    Schema(String),

    #[error("coefficient spec: segments of `{coefficient}` do not tile [0, 2pi): {detail}")]
    Tiling {
        coefficient: &'static str,
        detail: String,
    },

    #[error("coefficient spec: weight vanishes identically on [{lo}, {hi})")]
    ZeroWeight { lo: f64, hi: f64 },

    #[error("coefficient spec: power exponent {exponent} <= -1 on [{lo}, {hi}) is not integrable")]
    NonIntegrable { lo: f64, hi: f64, exponent: f64 },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("transfer: step size underflow at x = {x}")]
    StepUnderflow { x: f64 },

    #[error("transfer: non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("transfer: exact propagator needs constant segments, found a power segment on [{lo}, {hi})")]
    NotPiecewiseConstant { lo: f64, hi: f64 },

    #[error("floquet: z = {z} is (numerically) a Dirichlet eigenvalue, |s(2pi, z)| = {s_abs:e}")]
    DirichletEigenvalue { z: num_complex::Complex64, s_abs: f64 },

    #[error("floquet: 0 is not a periodic eigenvalue, Delta(0) = {delta}")]
    NotPeriodicAtZero { delta: f64 },

    #[error("bands: {0}")]
    Precondition(String),

    #[error("bands: only {found} of {wanted} eigenvalues found in [{lo}, {hi}]")]
    InsufficientEigenvalues {
        found: usize,
        wanted: usize,
        lo: f64,
        hi: f64,
    },

    #[error("criticality: {0}")]
    InconsistentInput(String),

    #[error("criticality: hill bottom not bracketed above {cap}")]
    ScanCap { cap: f64 },

    #[error("resolvent: {0}")]
    Resolvent(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by a
    /// numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::Tiling { .. }
                | Error::ZeroWeight { .. }
                | Error::NonIntegrable { .. }
                | Error::UnknownModel(_)
                | Error::Parameter(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
