//! The `check` property suite. Every check passes when its measured value is
//! at most its tolerance.

use spd_median::estimators::{
    commuting_fast_path, mean_median_report, objective_fp, riemannian_median, EstimateResult,
};
use spd_median::geometry::{congruence_transform, distance, weighted_geometric_mean, EPS_EQ};
use spd_median::{ContinuationConfig, Result, SpdMatrix, SpdTuple};

use crate::dataset::DatasetFile;
use crate::lcg::Lcg;
use crate::report::CheckEcho;

/// Distance tolerance for equalities between medians.
pub const MEDIAN_TOL: f64 = 1e-6;
/// Allowed violation of `δ(M, Λ) ≤ Σ w δ(A_k, Λ) ≤ (Σ w δ(A_k, Λ)²)^{1/2}`.
pub const CHAIN_TOL: f64 = 1e-8;
pub const HOMOGENEITY_SCALES: [f64; 3] = [0.1, 3.0, 100.0];
/// Relative `F₁` decrease tolerated at a probe (solver accuracy).
pub const PROBE_TOL: f64 = 1e-8;
/// Fraction of the way towards each data point at which `F₁` is probed.
const PROBE_STEPS: [f64; 2] = [1e-3, 1e-1];

pub struct CheckOutcome {
    pub median: EstimateResult,
    pub checks: Vec<CheckEcho>,
}

pub fn run_checks(ds: &DatasetFile, cfg: &ContinuationConfig, seed: u64) -> Result<CheckOutcome> {
    let tuple = ds.tuple();
    let mut checks = Vec::new();

    let chain = mean_median_report(&tuple, cfg)?;
    checks.push(CheckEcho::measured("inequality_chain", -chain.chain_slack(), CHAIN_TOL));
    let median = chain.median;
    let m = &median.estimate;

    let c = Lcg::new(seed).congruence(ds.d);
    let moved = median_of(&tuple.congruence(&c)?, cfg)?;
    checks.push(CheckEcho::measured("congruence", distance(&moved, &congruence_transform(&c, m)?)?, MEDIAN_TOL));

    let dual = median_of(&tuple.inverse(), cfg)?.inverse();
    checks.push(CheckEcho::measured("self_duality", distance(&dual, m)?, MEDIAN_TOL));

    for s in HOMOGENEITY_SCALES {
        let scaled = median_of(&tuple.scale(s)?, cfg)?;
        checks.push(CheckEcho::measured(format!("homogeneity_{s}"), distance(&scaled, &m.scale(s)?)?, MEDIAN_TOL));
    }

    checks.push(match commuting_fast_path(&tuple) {
        Some(fast) => CheckEcho::measured("commuting_fast_path", distance(&fast, m)?, MEDIAN_TOL),
        None => CheckEcho::skipped("commuting_fast_path"),
    });

    checks.push(minimizer_probe(&tuple, m)?);

    if let Some(expected) = &ds.expected_median {
        checks.push(CheckEcho::measured("expected_median", distance(expected, m)?, MEDIAN_TOL));
    }
    Ok(CheckOutcome { median, checks })
}

fn median_of(tuple: &SpdTuple, cfg: &ContinuationConfig) -> Result<SpdMatrix> {
    Ok(riemannian_median(tuple, cfg)?.estimate)
}

/// Largest decrease of `F₁` found by stepping from `M` towards each data
/// point, relative to `1 + F₁(M)`.
fn minimizer_probe(tuple: &SpdTuple, m: &SpdMatrix) -> Result<CheckEcho> {
    let f = objective_fp(m, tuple, 1.0)?;
    let mut worst = f64::NEG_INFINITY;
    for a in tuple.points() {
        if distance(m, a)? <= EPS_EQ {
            continue;
        }
        for s in PROBE_STEPS {
            let probe = weighted_geometric_mean(m, a, s)?;
            worst = worst.max((f - objective_fp(&probe, tuple, 1.0)?) / (1.0 + f));
        }
    }
    Ok(CheckEcho::measured("minimizer_probe", worst.max(0.0), PROBE_TOL))
}
