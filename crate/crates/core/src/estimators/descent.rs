//! Riemannian gradient descent on `F_p` with exact exponential retraction and
//! Armijo backtracking.
//!
//! The first trial step of every line search is the majorization step
//! `1 / (p Σ w_k δ_k^{p−2})` scaled by `step_init`. For `p = 2` that is the
//! classical Karcher fixed-point update `X ← Exp_X(Σ w_k Log_X A_k)`; for `p`
//! near one it is the manifold analogue of a Weiszfeld step, which keeps the
//! iteration well scaled both far from and very close to data points.

use nalgebra::DMatrix;

use super::objective::Snapshot;
use super::{EstimateResult, SolverConfig, SpdTuple};
use crate::error::{Error, Result};
use crate::geometry::exp_whitened;
use crate::symfun::{SpdMatrix, SymMatrix};

const MAX_BACKTRACKS: usize = 60;
/// Objective comparisons are only meaningful above round-off.
const ROUNDOFF_SLACK: f64 = 16.0 * f64::EPSILON;
/// Relative level below which objective differences are treated as noise.
const NOISE_BAND: f64 = 1e-9;

/// `exp(Σ w_k log A_k)`, the default starting point.
pub fn log_euclidean_mean(tuple: &SpdTuple) -> Result<SpdMatrix> {
    let d = tuple.dim();
    let mut acc = DMatrix::zeros(d, d);
    for (a, w) in tuple.points().iter().zip(tuple.weights()) {
        acc += a.log().matrix() * *w;
    }
    SpdMatrix::exp_of(&SymMatrix::new(acc)?)
}

/// Karcher mean: the minimizer of `Σ w_k δ(X, A_k)²`.
pub fn karcher_mean(tuple: &SpdTuple, cfg: &SolverConfig) -> Result<EstimateResult> {
    cfg.validate()?;
    minimize(tuple, 2.0, cfg, log_euclidean_mean(tuple)?)
}

/// The unique minimizer `M_p` of `F_p` for `1 < p ≤ 2`. Starts from `init`,
/// or from the Karcher mean when none is given.
pub fn p_minimizer(
    tuple: &SpdTuple,
    p: f64,
    cfg: &SolverConfig,
    init: Option<&SpdMatrix>,
) -> Result<EstimateResult> {
    cfg.validate()?;
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidInput(format!("p must lie in (1, 2], got {p}")));
    }
    let start = match init {
        Some(x) => x.clone(),
        None => karcher_mean(tuple, cfg)?.estimate,
    };
    minimize(tuple, p, cfg, start)
}

pub(crate) fn minimize(tuple: &SpdTuple, p: f64, cfg: &SolverConfig, init: SpdMatrix) -> Result<EstimateResult> {
    let w = tuple.weights();
    let mut cur = Snapshot::at(init, tuple, cfg.exec)?;
    let mut f = cur.objective(w, p);
    let mut grad = cur.gradient(w, p, cfg.singular_eps);
    let mut grad_norm = grad.norm();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iter {
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }
        // When the iterate sits on a data point whose weight outbalances the
        // pull of all other points, the minimizer lies inside the coincidence
        // ball: |∇(w δ^p)| = p w δ^{p−1} exceeds the remaining gradient there.
        if let Some((k, mass)) = cur.coincident(w, cfg.singular_eps) {
            if grad_norm <= p * mass * cfg.singular_eps.powf(p - 1.0) {
                cur = Snapshot::at(tuple.points()[k].clone(), tuple, cfg.exec)?;
                f = cur.objective(w, p);
                converged = true;
                break;
            }
        }

        let mut tau = cfg.step_init * cur.majorization_step(w, p, cfg.singular_eps);
        let decrease = grad_norm * grad_norm;
        let mut accepted = None;
        for attempt in 0..MAX_BACKTRACKS {
            let step = SymMatrix::from_matrix_unchecked(&grad * -tau);
            if let Ok(x_new) = exp_whitened(&cur.x, &step) {
                let trial = Snapshot::at(x_new, tuple, cfg.exec)?;
                let f_new = trial.objective(w, p);
                if f_new <= f - cfg.armijo_sigma * tau * decrease + ROUNDOFF_SLACK * f.abs() {
                    let g = trial.gradient(w, p, cfg.singular_eps);
                    accepted = Some((trial, f_new, g));
                    break;
                }
                // Below the evaluation noise of F the sufficient-decrease test
                // is meaningless; accept the full step if it shrinks the gradient.
                if attempt == 0 && f_new <= f + NOISE_BAND * (1.0 + f.abs()) {
                    let g = trial.gradient(w, p, cfg.singular_eps);
                    if g.norm() < grad_norm {
                        accepted = Some((trial, f_new, g));
                        break;
                    }
                }
            }
            tau *= cfg.armijo_beta;
        }
        let Some((trial, f_new, g)) = accepted else {
            break;
        };
        iterations += 1;
        cur = trial;
        f = f_new;
        grad = g;
        grad_norm = grad.norm();
    }
    if !converged && grad_norm <= cfg.grad_tol {
        converged = true;
    }

    Ok(EstimateResult {
        estimate: cur.x,
        objective: f,
        grad_norm,
        iterations,
        trace: Vec::new(),
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distance, weighted_geometric_mean};
    use std::f64::consts::E;

    fn diag(v: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(v).unwrap()
    }

    #[test]
    fn karcher_single_point() {
        let a = SpdMatrix::from_row_major(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let r = karcher_mean(&SpdTuple::new(vec![a.clone()]).unwrap(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(distance(&r.estimate, &a).unwrap() < 1e-12);
    }

    #[test]
    fn karcher_commuting_triple() {
        let t = SpdTuple::new(vec![
            SpdMatrix::identity(2),
            diag(&[E * E, E.powi(4)]),
            diag(&[E.powi(4), E * E]),
        ])
        .unwrap();
        let r = karcher_mean(&t, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(distance(&r.estimate, &diag(&[E * E, E * E])).unwrap() < 1e-12);
    }

    #[test]
    fn karcher_of_pair_is_midpoint() {
        let a = SpdMatrix::from_row_major(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let b = SpdMatrix::from_row_major(2, &[1.0, -0.3, -0.3, 4.0]).unwrap();
        let r = karcher_mean(&SpdTuple::new(vec![a.clone(), b.clone()]).unwrap(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        let mid = weighted_geometric_mean(&a, &b, 0.5).unwrap();
        assert!(distance(&r.estimate, &mid).unwrap() < 1e-8);
    }

    #[test]
    fn p_two_matches_karcher() {
        let t = SpdTuple::new(vec![
            SpdMatrix::from_row_major(2, &[2.0, 0.5, 0.5, 1.0]).unwrap(),
            SpdMatrix::from_row_major(2, &[1.0, -0.3, -0.3, 4.0]).unwrap(),
            diag(&[0.5, 3.0]),
        ])
        .unwrap();
        let cfg = SolverConfig::default();
        let k = karcher_mean(&t, &cfg).unwrap();
        let m = p_minimizer(&t, 2.0, &cfg, Some(&SpdMatrix::identity(2))).unwrap();
        assert!(distance(&k.estimate, &m.estimate).unwrap() < 1e-8);
    }

    #[test]
    fn symmetric_collinear_minimizer_for_every_p() {
        let t = SpdTuple::new((0..4).map(|k| diag(&[E.powi(k), E.powi(k)])).collect()).unwrap();
        let target = diag(&[E.powf(1.5), E.powf(1.5)]);
        for p in [1.1, 1.5, 2.0] {
            let r = p_minimizer(&t, p, &SolverConfig::default(), None).unwrap();
            assert!(r.converged, "p = {p}");
            assert!(distance(&r.estimate, &target).unwrap() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn rejects_p_outside_range() {
        let t = SpdTuple::new(vec![SpdMatrix::identity(2)]).unwrap();
        assert!(p_minimizer(&t, 1.0, &SolverConfig::default(), None).is_err());
        assert!(p_minimizer(&t, 2.5, &SolverConfig::default(), None).is_err());
    }

    #[test]
    fn p_minimizer_single_point() {
        let a = diag(&[3.0, 0.2]);
        let t = SpdTuple::new(vec![a.clone()]).unwrap();
        for p in [1.01, 1.5, 2.0] {
            let r = p_minimizer(&t, p, &SolverConfig::default(), Some(&SpdMatrix::identity(2))).unwrap();
            assert!(r.converged);
            assert!(distance(&r.estimate, &a).unwrap() < 1e-9);
        }
    }
}
