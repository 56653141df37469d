use thiserror::Error;

/// Errors raised by the matrix kernel, the geometry layer and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("eigen-solver did not converge within its sweep budget")]
    NoConvergence,

    #[error("matrix function requires a positive-definite argument (min eigenvalue {min_eig:e} <= floor {floor:e})")]
    Domain { min_eig: f64, floor: f64 },

    #[error("matrix is not symmetric: max |S - S^T| = {max_asym:e} exceeds tolerance {tol:e}")]
    Asymmetry { max_asym: f64, tol: f64 },

    #[error("matrix is not positive definite: min eigenvalue {min_eig:e} <= floor {floor:e}")]
    NotPositiveDefinite { min_eig: f64, floor: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("geodesic endpoints coincide (distance {distance:e})")]
    DegenerateGeodesic { distance: f64 },

    #[error("congruence matrix is singular (|det| = {det:e})")]
    SingularTransform { det: f64 },

    #[error("gradient of the distance is undefined at a data point (distance {distance:e})")]
    AtDataPoint { distance: f64 },

    #[error("search grid contains no nodes")]
    EmptyGrid,

    #[error("triangle is degenerate (collinear vertices); scalar median is ({}, {})", fallback[0], fallback[1])]
    DegenerateTriangle { fallback: [f64; 2] },

    #[error("invalid weights: {0}")]
    Weights(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
