use super::{karcher_mean, riemannian_median, ContinuationConfig, EstimateResult, SpdTuple};
use crate::error::{Error, Result};
use crate::geometry::{distance, exp_map, tangent_norm, TangentVector};

/// Median, Karcher mean and the three weighted quantities that sandwich the
/// median–mean distance: `δ(M, Λ) ≤ Σ w_k δ(A_k, Λ) ≤ (Σ w_k δ(A_k, Λ)²)^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMedianReport {
    pub median: EstimateResult,
    pub karcher: EstimateResult,
    pub delta_m_lambda: f64,
    pub mean_abs_dev: f64,
    pub rms_dev: f64,
}

impl MeanMedianReport {
    /// Smallest margin in the inequality chain; negative means a violation.
    pub fn chain_slack(&self) -> f64 {
        (self.mean_abs_dev - self.delta_m_lambda).min(self.rms_dev - self.mean_abs_dev)
    }
}

pub fn mean_median_report(tuple: &SpdTuple, cfg: &ContinuationConfig) -> Result<MeanMedianReport> {
    let median = riemannian_median(tuple, cfg)?;
    let karcher = karcher_mean(tuple, &cfg.inner)?;
    let lambda = &karcher.estimate;
    let mut mean_abs_dev = 0.0;
    let mut mean_sq_dev = 0.0;
    for (a, w) in tuple.points().iter().zip(tuple.weights()) {
        let d = distance(a, lambda)?;
        mean_abs_dev += w * d;
        mean_sq_dev += w * d * d;
    }
    let delta_m_lambda = distance(&median.estimate, lambda)?;
    Ok(MeanMedianReport { median, karcher, delta_m_lambda, mean_abs_dev, rms_dev: mean_sq_dev.sqrt() })
}

/// One row of [`outlier_displacement_study`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierRow {
    pub t: f64,
    pub median_displacement: f64,
    pub karcher_displacement: f64,
}

/// Moves a single extra point away from the first base point along a fixed
/// direction and records how far the median and the Karcher mean follow it.
///
/// The outlier `Exp_{A₁}(t·u)`, with `u` the unit-normalized `direction`,
/// receives weight `1/(n+1)`; the base weights are scaled by `n/(n+1)`.
pub fn outlier_displacement_study(
    base: &SpdTuple,
    direction: &TangentVector,
    distances: &[f64],
    cfg: &ContinuationConfig,
) -> Result<Vec<OutlierRow>> {
    if distances.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidInput("outlier distances must be finite and non-negative".into()));
    }
    if distances.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("outlier distances must be ascending".into()));
    }
    let anchor = &base.points()[0];
    let unit = {
        let norm = tangent_norm(anchor, direction)?;
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidInput("outlier direction must be non-zero".into()));
        }
        direction.scale(1.0 / norm)
    };
    if distances.is_empty() {
        return Ok(Vec::new());
    }

    let base_median = riemannian_median(base, cfg)?.estimate;
    let base_mean = karcher_mean(base, &cfg.inner)?.estimate;
    let n = base.len() as f64;

    let mut rows = Vec::with_capacity(distances.len());
    for &t in distances {
        let outlier = exp_map(anchor, &unit.scale(t))?;
        let mut points = base.points().to_vec();
        points.push(outlier);
        let mut weights: Vec<f64> = base.weights().iter().map(|w| w * n / (n + 1.0)).collect();
        weights.push(1.0 / (n + 1.0));
        let tuple = SpdTuple::with_unnormalized_weights(points, weights)?;
        let median = riemannian_median(&tuple, cfg)?.estimate;
        let mean = karcher_mean(&tuple, &cfg.inner)?.estimate;
        rows.push(OutlierRow {
            t,
            median_displacement: distance(&median, &base_median)?,
            karcher_displacement: distance(&mean, &base_mean)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::weighted_geometric_mean;
    use crate::symfun::{SpdMatrix, SymMatrix};

    #[test]
    fn equal_points_report_zeros() {
        let a = SpdMatrix::from_row_major(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let r = mean_median_report(&SpdTuple::new(vec![a.clone(), a.clone(), a]).unwrap(), &Default::default())
            .unwrap();
        assert!(r.delta_m_lambda < 1e-12 && r.mean_abs_dev < 1e-12 && r.rms_dev < 1e-12);
    }

    #[test]
    fn two_point_report() {
        let a = SpdMatrix::from_row_major(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let b = SpdMatrix::from_row_major(2, &[1.0, -0.3, -0.3, 4.0]).unwrap();
        let d = distance(&a, &b).unwrap();
        let r = mean_median_report(&SpdTuple::new(vec![a.clone(), b.clone()]).unwrap(), &Default::default()).unwrap();
        let mid = weighted_geometric_mean(&a, &b, 0.5).unwrap();
        assert!(distance(&r.median.estimate, &mid).unwrap() < 1e-8);
        assert!(r.delta_m_lambda < 1e-8);
        assert!((r.mean_abs_dev - d / 2.0).abs() < 1e-8);
        assert!((r.rms_dev - d / 2.0).abs() < 1e-8);
    }

    #[test]
    fn outlier_edge_cases() {
        let i = SpdMatrix::identity(2);
        let base = SpdTuple::new(vec![i.clone(), i.clone(), i.clone()]).unwrap();
        let dir = TangentVector::new(i.clone(), SymMatrix::from_diagonal(&[1.0, 0.0]).unwrap()).unwrap();
        let cfg = ContinuationConfig::default();
        assert!(outlier_displacement_study(&base, &dir, &[], &cfg).unwrap().is_empty());
        let rows = outlier_displacement_study(&base, &dir, &[0.0], &cfg).unwrap();
        assert_eq!(rows[0].median_displacement, 0.0);
        assert!(rows[0].karcher_displacement < 1e-12);
        assert!(outlier_displacement_study(&base, &dir, &[2.0, 1.0], &cfg).is_err());
        let zero = TangentVector::zero(i);
        assert!(outlier_displacement_study(&base, &zero, &[1.0], &cfg).is_err());
    }
}
