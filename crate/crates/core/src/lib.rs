//! Riemannian median and Karcher mean of symmetric positive-definite matrices
//! under the affine-invariant metric `g_A(X, Y) = Tr(A⁻¹ X A⁻¹ Y)`.
//!
//! * [`symfun`]: symmetric eigendecomposition and spectral matrix functions.
//! * [`geometry`]: distance, geodesics, exponential/logarithmic maps,
//!   congruence action and distance gradients.
//! * [`estimators`]: `F_p` objectives, Karcher mean, `M_p` minimizers, the
//!   median by p-continuation, collinearity certificates, the commuting fast
//!   path, and the mean–median and outlier studies.
//! * [`oracles`]: Euclidean reference solvers used to validate the above.
//!
//! Per-term loops run on rayon when the `parallel` feature (default) is
//! enabled; reductions are always sequential in index order, so results are
//! bit-identical across thread counts.

pub mod error;
pub mod estimators;
pub mod geometry;
pub mod oracles;
pub mod par;
pub mod symfun;

/// Dense storage used in the public API (congruence matrices).
pub use nalgebra;

pub use error::{Error, Result};
pub use estimators::{
    ContinuationConfig, EstimateResult, GeodesicCertificate, SolverConfig, SpdTuple, StageRecord,
};
pub use geometry::TangentVector;
pub use symfun::{EigDecomposition, MatrixFn, SpdFloor, SpdMatrix, SymMatrix};
