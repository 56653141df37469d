//! Dense symmetric matrices, their eigendecomposition, and spectral matrix
//! functions (`exp`, `log`, square roots, real powers).
//!
//! Every geometric formula in this crate reduces to a symmetric
//! eigendecomposition followed by a scalar map on the spectrum, so this module
//! is the only place that touches raw eigen-solvers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative off-diagonal threshold for the Jacobi solver, scaled by `‖S‖_F`.
pub const JACOBI_TOL: f64 = 1e-14;
/// Maximum number of full cyclic sweeps before [`Error::NoConvergence`].
pub const JACOBI_MAX_SWEEPS: usize = 64;
/// Default relative positive-definiteness floor.
pub const DEFAULT_SPD_FLOOR: f64 = 1e-12;

/// Returns `(M + Mᵀ) / 2`.
pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// A real symmetric `d × d` matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// Wraps a square matrix, symmetrizing it. Rejects non-finite entries.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { m: symmetrize(&m) })
    }

    pub fn from_row_major(d: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(d, d, entries))
    }

    pub fn zeros(d: usize) -> Self {
        Self { m: DMatrix::zeros(d, d) }
    }

    pub fn identity(d: usize) -> Self {
        Self { m: DMatrix::identity(d, d) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    /// Internal constructor for results that are symmetric by construction.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        Self { m: symmetrize(&m) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.m.diagonal().iter().copied().collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        Self { m: &self.m * c }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m - &other.m })
    }

    /// `C S Cᵀ` for an arbitrary square `C`.
    pub fn congruence(&self, c: &DMatrix<f64>) -> Result<SymMatrix> {
        check_dims(self.dim(), c.nrows())?;
        check_dims(self.dim(), c.ncols())?;
        Ok(Self::from_matrix_unchecked(c * &self.m * c.transpose()))
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Spectral decomposition `S = Q diag(λ) Qᵀ` with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    /// Orthogonal matrix whose columns are the eigenvectors.
    pub vectors: DMatrix<f64>,
}

impl EigDecomposition {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `Q diag(f(λ)) Qᵀ`, symmetrized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        if mapped.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SymMatrix::from_matrix_unchecked(self.compose(&mapped)))
    }

    fn compose(&self, diag: &[f64]) -> DMatrix<f64> {
        let q = &self.vectors;
        let mut scaled = q.clone();
        for (j, &l) in diag.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        scaled * q.transpose()
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Deterministic: the same input bits always give the same output bits.
pub fn sym_eig(s: &SymMatrix) -> Result<EigDecomposition> {
    let d = s.dim();
    let mut a = s.m.clone();
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut v = DMatrix::<f64>::identity(d, d);
    let threshold = JACOBI_TOL * a.norm();

    let off_norm = |a: &DMatrix<f64>| {
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = off_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence);
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let sn = t * c;
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        converged = off_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(d, d, |r, c| v[(r, order[c])]);
    Ok(EigDecomposition { values, vectors })
}

/// Positive-definiteness floor applied to the smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpdFloor {
    /// `λ_min > factor · max(1, λ_max)`.
    Relative(f64),
    /// `λ_min > 0`.
    Strict,
}

impl Default for SpdFloor {
    fn default() -> Self {
        SpdFloor::Relative(DEFAULT_SPD_FLOOR)
    }
}

impl SpdFloor {
    pub fn threshold(self, max_eig: f64) -> f64 {
        match self {
            SpdFloor::Relative(factor) => factor * max_eig.max(1.0),
            SpdFloor::Strict => 0.0,
        }
    }

    fn check(self, eig: &EigDecomposition) -> Option<f64> {
        let floor = self.threshold(eig.max());
        (eig.min() <= floor).then_some(floor)
    }
}

/// Scalar functions that can be lifted to symmetric matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixFn {
    Exp,
    Log,
    Sqrt,
    InvSqrt,
    Pow(f64),
}

impl MatrixFn {
    fn needs_positive(self) -> bool {
        match self {
            MatrixFn::Exp => false,
            MatrixFn::Pow(t) => t.fract() != 0.0 || t < 0.0,
            _ => true,
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            MatrixFn::Exp => x.exp(),
            MatrixFn::Log => x.ln(),
            MatrixFn::Sqrt => x.sqrt(),
            MatrixFn::InvSqrt => 1.0 / x.sqrt(),
            MatrixFn::Pow(t) if t.fract() == 0.0 && t.abs() < i32::MAX as f64 => x.powi(t as i32),
            MatrixFn::Pow(t) => x.powf(t),
        }
    }
}

/// `Q diag(f(λ)) Qᵀ` with the default positivity floor.
pub fn matrix_fn(s: &SymMatrix, f: MatrixFn) -> Result<SymMatrix> {
    matrix_fn_with_floor(s, f, SpdFloor::default())
}

pub fn matrix_fn_with_floor(s: &SymMatrix, f: MatrixFn, floor: SpdFloor) -> Result<SymMatrix> {
    let eig = sym_eig(s)?;
    if f.needs_positive() {
        if let Some(floor) = floor.check(&eig) {
            return Err(Error::Domain { min_eig: eig.min(), floor });
        }
    }
    eig.map(|l| f.apply(l))
}

/// A symmetric positive-definite matrix together with its spectral
/// decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    sym: SymMatrix,
    eig: EigDecomposition,
}

impl SpdMatrix {
    /// Checks positive-definiteness with the default relative floor.
    pub fn new(sym: SymMatrix) -> Result<Self> {
        Self::with_floor(sym, SpdFloor::default())
    }

    pub fn with_floor(sym: SymMatrix, floor: SpdFloor) -> Result<Self> {
        let eig = sym_eig(&sym)?;
        if let Some(floor) = floor.check(&eig) {
            return Err(Error::NotPositiveDefinite { min_eig: eig.min(), floor });
        }
        Ok(Self { sym, eig })
    }

    /// Accepts any matrix whose eigenvalues are strictly positive. Used for
    /// results of operations that preserve positive-definiteness.
    pub(crate) fn strict(m: DMatrix<f64>) -> Result<Self> {
        Self::with_floor(SymMatrix::new(m)?, SpdFloor::Strict)
    }

    pub fn from_row_major(d: usize, entries: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_row_major(d, entries)?)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_eig_positive(vec![1.0; d], DMatrix::identity(d, d))
    }

    /// Diagonal matrix with the given (positive) entries.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::with_floor(SymMatrix::from_diagonal(diag)?, SpdFloor::Strict)
    }

    /// `exp(H)`; positive-definite for every symmetric `H`.
    pub fn exp_of(h: &SymMatrix) -> Result<Self> {
        let eig = sym_eig(h)?;
        let values: Vec<f64> = eig.values.iter().map(|l| l.exp()).collect();
        if values.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_eig_positive(values, eig.vectors))
    }

    /// Builds the matrix from known positive eigenvalues (ascending order is
    /// restored here) and orthogonal eigenvectors.
    fn from_eig_positive(values: Vec<f64>, vectors: DMatrix<f64>) -> Self {
        let d = values.len();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let eig = EigDecomposition {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: DMatrix::from_fn(d, d, |r, c| vectors[(r, order[c])]),
        };
        let sym = SymMatrix::from_matrix_unchecked(eig.compose(&eig.values));
        Self { sym, eig }
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        self.sym.matrix()
    }

    pub fn eig(&self) -> &EigDecomposition {
        &self.eig
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.sym.to_row_major()
    }

    fn map_positive(&self, f: impl Fn(f64) -> f64) -> SpdMatrix {
        let values = self.eig.values.iter().map(|&l| f(l)).collect();
        Self::from_eig_positive(values, self.eig.vectors.clone())
    }

    pub fn sqrt(&self) -> SpdMatrix {
        self.map_positive(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> SpdMatrix {
        self.map_positive(|l| 1.0 / l.sqrt())
    }

    pub fn inverse(&self) -> SpdMatrix {
        self.map_positive(|l| 1.0 / l)
    }

    pub fn pow(&self, t: f64) -> SpdMatrix {
        self.map_positive(|l| l.powf(t))
    }

    pub fn log(&self) -> SymMatrix {
        SymMatrix::from_matrix_unchecked(self.eig.compose(
            &self.eig.values.iter().map(|l| l.ln()).collect::<Vec<_>>(),
        ))
    }

    /// `c · A` for `c > 0`.
    pub fn scale(&self, c: f64) -> Result<SpdMatrix> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor must be positive, got {c}")));
        }
        Ok(self.map_positive(|l| c * l))
    }
}

/// Validates a raw row-major `d × d` array as an SPD matrix.
///
/// Asymmetry up to `tol` (max-entry norm of `S − Sᵀ`) is removed by
/// symmetrization; anything larger is rejected.
pub fn validate_spd(d: usize, entries: &[f64], tol: f64) -> Result<SpdMatrix> {
    validate_spd_with_floor(d, entries, tol, SpdFloor::default())
}

pub fn validate_spd_with_floor(d: usize, entries: &[f64], tol: f64, floor: SpdFloor) -> Result<SpdMatrix> {
    if d == 0 {
        return Err(Error::InvalidInput("matrix dimension must be positive".into()));
    }
    if entries.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: entries.len() });
    }
    if entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let raw = DMatrix::from_row_slice(d, d, entries);
    let max_asym = max_asymmetry(&raw);
    if max_asym > tol {
        return Err(Error::Asymmetry { max_asym, tol });
    }
    SpdMatrix::with_floor(SymMatrix::new(raw)?, floor)
}
