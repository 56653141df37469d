//! JSON dataset files: `{"d": 2, "matrices": [[...row-major...], ...],
//! "weights": [...], "name": "...", "expected_median": [...]}`.
//!
//! Only `d` and `matrices` are required. `expected_median` is a reference
//! answer that `check` compares against.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use spd_median::symfun::validate_spd;
use spd_median::{Error as CoreError, SpdMatrix, SpdTuple};
use thiserror::Error;

/// Dataset weights must sum to one within this before renormalization.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Default absolute symmetry tolerance for dataset matrices.
pub const DEFAULT_SYM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix {index} is not symmetric (max |S - S^T| = {max_asym:e})")]
    Asymmetry { index: usize, max_asym: f64 },

    #[error("matrix {index} is not positive definite (min eigenvalue {min_eig:e})")]
    NotPositiveDefinite { index: usize, min_eig: f64 },

    #[error("matrix {index}: {reason}")]
    Matrix { index: usize, reason: String },

    #[error("weight error: {0}")]
    Weight(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    d: usize,
    matrices: Vec<Vec<f64>>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    expected_median: Option<Vec<f64>>,
}

/// A validated dataset. Weights are always present and sum to one exactly
/// up to a final rounding.
#[derive(Debug, Clone)]
pub struct DatasetFile {
    pub d: usize,
    pub matrices: Vec<SpdMatrix>,
    pub weights: Vec<f64>,
    pub name: Option<String>,
    pub expected_median: Option<SpdMatrix>,
}

impl DatasetFile {
    pub fn tuple(&self) -> SpdTuple {
        SpdTuple::with_weights(self.matrices.clone(), self.weights.clone())
            .expect("dataset weights are validated at parse time")
    }

    /// Replaces the weights, applying the same validation as the file field.
    pub fn set_weights(&mut self, weights: &[f64]) -> Result<(), DatasetError> {
        self.weights = normalize_weights(weights, self.matrices.len())?;
        Ok(())
    }
}

pub fn parse_dataset(path: &Path, sym_tol: f64) -> Result<DatasetFile, DatasetError> {
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io { path: path.to_owned(), source })?;
    parse_dataset_str(&text, sym_tol)
}

pub fn parse_dataset_str(text: &str, sym_tol: f64) -> Result<DatasetFile, DatasetError> {
    let raw: RawDataset = serde_json::from_str(text).map_err(|e| DatasetError::Parse(e.to_string()))?;
    if raw.d == 0 {
        return Err(DatasetError::Parse("d must be positive".into()));
    }
    if raw.matrices.is_empty() {
        return Err(DatasetError::Parse("dataset contains no matrices".into()));
    }
    let matrices = raw
        .matrices
        .iter()
        .enumerate()
        .map(|(index, m)| parse_matrix(raw.d, m, sym_tol, index))
        .collect::<Result<Vec<_>, _>>()?;
    let weights = match &raw.weights {
        Some(w) => normalize_weights(w, matrices.len())?,
        None => vec![1.0 / matrices.len() as f64; matrices.len()],
    };
    let expected_median = raw
        .expected_median
        .as_ref()
        .map(|m| {
            parse_matrix(raw.d, m, sym_tol, 0).map_err(|e| DatasetError::Parse(format!("expected_median: {e}")))
        })
        .transpose()?;
    Ok(DatasetFile { d: raw.d, matrices, weights, name: raw.name, expected_median })
}

fn parse_matrix(d: usize, entries: &[f64], sym_tol: f64, index: usize) -> Result<SpdMatrix, DatasetError> {
    validate_spd(d, entries, sym_tol).map_err(|e| match e {
        CoreError::Asymmetry { max_asym, .. } => DatasetError::Asymmetry { index, max_asym },
        CoreError::NotPositiveDefinite { min_eig, .. } => DatasetError::NotPositiveDefinite { index, min_eig },
        other => DatasetError::Matrix { index, reason: other.to_string() },
    })
}

/// Parses a comma-separated weight list such as `0.2,0.3,0.5`.
pub fn parse_weight_list(s: &str) -> Result<Vec<f64>, DatasetError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| DatasetError::Weight(format!("'{t}': {e}"))))
        .collect()
}

fn normalize_weights(w: &[f64], n: usize) -> Result<Vec<f64>, DatasetError> {
    if w.len() != n {
        return Err(DatasetError::Weight(format!("{} weights for {n} matrices", w.len())));
    }
    if let Some(i) = w.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(DatasetError::Weight(format!("weight {i} is not positive ({})", w[i])));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(DatasetError::Weight(format!("weights sum to {sum}, not 1")));
    }
    Ok(w.iter().map(|x| x / sum).collect())
}
