use thiserror::Error;

/// Failures raised by the linear algebra substrate and the criteria built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("relative asymmetry {asymmetry:e} exceeds sym_tol {sym_tol:e}")]
    AsymmetricInput { asymmetry: f64, sym_tol: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("{unit} is numerically singular (sigma_min/sigma_max = {ratio:e})")]
    NumericallySingular { unit: String, ratio: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite entry at {0}")]
    NonFinite(String),

    #[error("block order {order} too small, at least 2 blocks required")]
    OrderTooSmall { order: usize },

    #[error("block matrix is not self-adjoint (relative asymmetry {asymmetry:e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("block matrix is not bidiagonal")]
    NotBidiagonal,

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(String),

    #[error("functional returned a non-finite value")]
    NonFiniteEvaluation,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Renames the unit reported by a singularity error.
    pub(crate) fn singular_as(self, unit: &str) -> Self {
        match self {
            Error::NumericallySingular { ratio, .. } => Error::NumericallySingular {
                unit: unit.to_string(),
                ratio,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
