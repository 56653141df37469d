use nalgebra::DMatrix;

use super::{SolverConfig, SpdTuple};
use crate::error::{Error, Result};
use crate::geometry::{unwhiten, whiten, TangentVector};
use crate::par::{try_map_indexed, Execution};
use crate::symfun::{check_dims, SpdMatrix, SymMatrix};

/// Everything the solvers need at one iterate `X`: the distances `δ(X, A_k)`
/// and the whitened logarithms `log(X^{-1/2} A_k X^{-1/2})`.
#[derive(Debug, Clone)]
pub(crate) struct Snapshot {
    pub x: SpdMatrix,
    pub dists: Vec<f64>,
    pub logs: Vec<SymMatrix>,
}

impl Snapshot {
    pub fn at(x: SpdMatrix, tuple: &SpdTuple, exec: Execution) -> Result<Self> {
        check_dims(tuple.dim(), x.dim())?;
        let terms = try_map_indexed(exec, tuple.len(), |k| {
            let s = whiten(&x, &tuple.points()[k])?;
            let dist = s.eig().values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt();
            Ok::<_, Error>((dist, s.log()))
        })?;
        let (dists, logs) = terms.into_iter().unzip();
        Ok(Self { x, dists, logs })
    }

    pub fn objective(&self, weights: &[f64], p: f64) -> f64 {
        self.dists.iter().zip(weights).map(|(d, w)| w * d.powf(p)).sum()
    }

    /// Whitened Riemannian gradient `X^{-1/2} ∇F_p X^{-1/2}`. Terms closer
    /// than `singular_eps` are dropped.
    pub fn gradient(&self, weights: &[f64], p: f64, singular_eps: f64) -> DMatrix<f64> {
        let d = self.x.dim();
        let mut g = DMatrix::zeros(d, d);
        for ((dist, log), w) in self.dists.iter().zip(&self.logs).zip(weights) {
            if *dist > singular_eps {
                g -= log.matrix() * (w * p * dist.powf(p - 2.0));
            }
        }
        g
    }

    /// Indices and total weight of data points within `singular_eps` of `X`.
    pub fn coincident(&self, weights: &[f64], singular_eps: f64) -> Option<(usize, f64)> {
        let mut first = None;
        let mut mass = 0.0;
        for (k, (dist, w)) in self.dists.iter().zip(weights).enumerate() {
            if *dist <= singular_eps {
                first.get_or_insert(k);
                mass += w;
            }
        }
        first.map(|k| (k, mass))
    }

    /// Step length of the majorize-minimize (Weiszfeld-type) update, which
    /// for `p = 2` is the Karcher fixed-point step.
    pub fn majorization_step(&self, weights: &[f64], p: f64, singular_eps: f64) -> f64 {
        let curvature: f64 = self
            .dists
            .iter()
            .zip(weights)
            .map(|(d, w)| w * d.max(singular_eps).powf(p - 2.0))
            .sum();
        1.0 / (p * curvature)
    }
}

/// `F_p(X) = Σ w_k δ(X, A_k)^p`.
pub fn objective_fp(x: &SpdMatrix, tuple: &SpdTuple, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("exponent p must be >= 1, got {p}")));
    }
    Ok(Snapshot::at(x.clone(), tuple, Execution::Auto)?.objective(tuple.weights(), p))
}

/// Riemannian gradient of `F_p` at `X` for `p > 1`.
pub fn grad_fp(x: &SpdMatrix, tuple: &SpdTuple, p: f64, cfg: &SolverConfig) -> Result<TangentVector> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("exponent p must be > 1, got {p}")));
    }
    let snap = Snapshot::at(x.clone(), tuple, cfg.exec)?;
    let g = snap.gradient(tuple.weights(), p, cfg.singular_eps);
    Ok(TangentVector { at: x.clone(), vec: unwhiten(x, &g) })
}
