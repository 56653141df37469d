//! Lᵖ Fréchet estimators on the SPD cone: the Karcher mean (p = 2), the
//! unique minimizer `M_p` of `F_p` for `1 < p ≤ 2`, and the Riemannian median
//! obtained as the limit `p ↘ 1` by warm-started continuation.

mod collinear;
mod commuting;
mod descent;
mod median;
mod objective;
mod studies;

pub use collinear::{check_collinear, GeodesicCertificate, DEFAULT_COLLINEAR_TOL};
pub use commuting::{commuting_fast_path, commuting_fast_path_with_tol, DEFAULT_COMMUTE_TOL};
pub use descent::{karcher_mean, log_euclidean_mean, p_minimizer};
pub use median::riemannian_median;
pub use objective::{grad_fp, objective_fp};
pub use studies::{mean_median_report, outlier_displacement_study, MeanMedianReport, OutlierRow};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::congruence_transform;
use crate::par::Execution;
use crate::symfun::SpdMatrix;

/// Tolerance on `|Σ w_k − 1|`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// An ordered tuple of SPD matrices of a common dimension with probability
/// weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdTuple {
    points: Vec<SpdMatrix>,
    weights: Vec<f64>,
}

impl SpdTuple {
    /// Uniform weights `1/n`.
    pub fn new(points: Vec<SpdMatrix>) -> Result<Self> {
        let n = points.len();
        Self::with_weights(points, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn with_weights(points: Vec<SpdMatrix>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("tuple must contain at least one matrix".into()));
        }
        if weights.len() != points.len() {
            return Err(Error::Weights(format!(
                "{} weights for {} matrices",
                weights.len(),
                points.len()
            )));
        }
        let d = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Weights(format!("weights must be positive, found {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Weights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { points, weights })
    }

    /// Normalizes arbitrary positive weights to sum to one.
    pub fn with_unnormalized_weights(points: Vec<SpdMatrix>, weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::Weights(format!("weights sum to {sum}")));
        }
        Self::with_weights(points, weights.iter().map(|w| w / sum).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[SpdMatrix] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.weights.iter().all(|&w| (w - u).abs() <= WEIGHT_SUM_TOL)
    }

    /// Applies `f` to every point, keeping the weights.
    pub fn try_map(&self, f: impl Fn(&SpdMatrix) -> Result<SpdMatrix>) -> Result<SpdTuple> {
        let points = self.points.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(SpdTuple { points, weights: self.weights.clone() })
    }

    /// `(C A_k Cᵀ)_k`.
    pub fn congruence(&self, c: &DMatrix<f64>) -> Result<SpdTuple> {
        self.try_map(|a| congruence_transform(c, a))
    }

    /// `(c A_k)_k` for `c > 0`.
    pub fn scale(&self, c: f64) -> Result<SpdTuple> {
        self.try_map(|a| a.scale(c))
    }

    /// `(A_k⁻¹)_k`.
    pub fn inverse(&self) -> SpdTuple {
        SpdTuple {
            points: self.points.iter().map(SpdMatrix::inverse).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Settings for a single Riemannian gradient-descent solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once the Riemannian gradient norm drops to this value.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Multiplier on the majorization step length for the first line-search trial.
    pub step_init: f64,
    pub armijo_beta: f64,
    pub armijo_sigma: f64,
    /// Data points closer than this to the iterate are treated as coincident.
    pub singular_eps: f64,
    pub exec: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iter: 500,
            step_init: 1.0,
            armijo_beta: 0.5,
            armijo_sigma: 1e-4,
            singular_eps: 1e-9,
            exec: Execution::Auto,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
            }
        };
        positive("grad_tol", self.grad_tol)?;
        positive("step_init", self.step_init)?;
        positive("singular_eps", self.singular_eps)?;
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        for (name, v) in [("armijo_beta", self.armijo_beta), ("armijo_sigma", self.armijo_sigma)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Schedule `p_j = 1 + (p_start − 1)·p_ratioʲ` for the median continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationConfig {
    pub p_start: f64,
    pub p_ratio: f64,
    /// Stop when successive stage minimizers are within this distance.
    pub cont_tol: f64,
    pub max_stages: usize,
    pub inner: SolverConfig,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self { p_start: 2.0, p_ratio: 0.5, cont_tol: 1e-9, max_stages: 40, inner: SolverConfig::default() }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        if !(self.p_start > 1.0 && self.p_start <= 2.0) {
            return Err(Error::InvalidInput(format!("p_start must lie in (1, 2], got {}", self.p_start)));
        }
        if !(self.p_ratio > 0.0 && self.p_ratio < 1.0) {
            return Err(Error::InvalidInput(format!("p_ratio must lie in (0, 1), got {}", self.p_ratio)));
        }
        if !(self.cont_tol > 0.0 && self.cont_tol.is_finite()) {
            return Err(Error::InvalidInput(format!("cont_tol must be positive, got {}", self.cont_tol)));
        }
        if self.max_stages == 0 {
            return Err(Error::InvalidInput("max_stages must be positive".into()));
        }
        Ok(())
    }

    pub fn p_at(&self, stage: usize) -> f64 {
        1.0 + (self.p_start - 1.0) * self.p_ratio.powi(stage as i32)
    }
}

/// One stage of the p-continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    pub p: f64,
    pub iterations: usize,
    /// Distance from the previous stage's minimizer (from the initial point
    /// for the first stage).
    pub step: f64,
    pub converged: bool,
}

/// Output of every estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub estimate: SpdMatrix,
    /// `F_p` at the estimate (`F₁` for the median).
    pub objective: f64,
    /// Riemannian gradient norm of the last smooth objective solved.
    pub grad_norm: f64,
    pub iterations: usize,
    pub trace: Vec<StageRecord>,
    pub converged: bool,
}
