use thiserror::Error;

/// Errors raised by mesh generation, factorization and approximation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}, {z}) lies outside the cylinder")]
    OutsideDomain { x: f64, y: f64, z: f64 },

    #[error("argument {value} outside [-1, 1]")]
    OutsideInterval { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("rank deficiency at pivot step {step}: column norm {norm:e} below {threshold:e}")]
    RankDeficient {
        step: usize,
        norm: f64,
        threshold: f64,
    },

    #[error("singular matrix at elimination step {step}: pivot {pivot:e} below {threshold:e}")]
    Singular {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error(
        "quadrature did not converge after {doublings} doublings (last difference {difference:e})"
    )]
    NonConvergence { doublings: usize, difference: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical pipeline (as opposed to bad input or IO).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. } | Error::Singular { .. } | Error::NonConvergence { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
