use super::descent::{karcher_mean, minimize};
use super::objective::Snapshot;
use super::{ContinuationConfig, EstimateResult, SpdTuple, StageRecord};
use crate::error::Result;
use crate::geometry::distance;

/// Riemannian median `M = lim_{p↘1} M_p`.
///
/// Solves for `M_{p_j}` along the geometric schedule of `cfg`, warm-starting
/// each stage at the previous minimizer (the first stage at the Karcher mean),
/// and stops once two successive stage minimizers are within `cont_tol`.
pub fn riemannian_median(tuple: &SpdTuple, cfg: &ContinuationConfig) -> Result<EstimateResult> {
    cfg.validate()?;
    let inner = &cfg.inner;
    let karcher = karcher_mean(tuple, inner)?;
    let mut current = karcher.estimate;
    let mut trace = Vec::with_capacity(cfg.max_stages);
    let mut iterations = karcher.iterations;
    let mut grad_norm = karcher.grad_norm;
    let mut converged = false;

    for stage in 0..cfg.max_stages {
        let p = cfg.p_at(stage);
        let r = minimize(tuple, p, inner, current.clone())?;
        let step = distance(&current, &r.estimate)?;
        trace.push(StageRecord { p, iterations: r.iterations, step, converged: r.converged });
        iterations += r.iterations;
        grad_norm = r.grad_norm;
        current = r.estimate;
        if stage > 0 && r.converged && step <= cfg.cont_tol {
            converged = true;
            break;
        }
    }

    let objective = Snapshot::at(current.clone(), tuple, inner.exec)?.objective(tuple.weights(), 1.0);
    Ok(EstimateResult { estimate: current, objective, grad_norm, iterations, trace, converged })
}
