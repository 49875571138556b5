use thiserror::Error;

/// Errors raised by the geometry kernel, the estimators and the search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate ({re}, {im})")]
    NonFinite { re: f64, im: f64 },

    #[error("point {index} lies on the continuum: distance {distance:e} <= {limit:e}")]
    PointOnContinuum {
        index: usize,
        distance: f64,
        limit: f64,
    },

    #[error("point with modulus {modulus} is outside the open unit disk")]
    OutsideDisk { modulus: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("continuum is not connected ({groups} separate groups of pieces)")]
    Disconnected { groups: usize },

    #[error("point lies on the boundary arc of the slit domain")]
    OnSlit,

    #[error("invalid walk start: {0}")]
    InvalidStart(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("adaptive quadrature failed after {evaluations} evaluations (error estimate {error_estimate:e})")]
    QuadratureFailure {
        evaluations: usize,
        error_estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
