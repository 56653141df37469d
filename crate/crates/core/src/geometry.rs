//! Affine-invariant Riemannian geometry of the SPD cone.
//!
//! The metric at `A` is `g_A(X, Y) = Tr(A⁻¹ X A⁻¹ Y)`. Almost every quantity
//! here is computed after "whitening" by `A^{-1/2}`: the congruence
//! `B ↦ A^{-1/2} B A^{-1/2}` maps `A` to the identity, where the metric is the
//! Frobenius inner product and the exponential map is the matrix exponential.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symfun::{check_dims, sym_eig, SpdMatrix, SymMatrix};

/// Distances at or below this are treated as "the same point".
pub const EPS_EQ: f64 = 1e-12;
/// `|det C|` must exceed this for a congruence to be accepted.
pub const DET_FLOOR: f64 = 1e-12;

/// A symmetric matrix `vec` viewed as a tangent vector at the SPD point `at`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub at: SpdMatrix,
    pub vec: SymMatrix,
}

impl TangentVector {
    pub fn new(at: SpdMatrix, vec: SymMatrix) -> Result<Self> {
        check_dims(at.dim(), vec.dim())?;
        Ok(Self { at, vec })
    }

    pub fn zero(at: SpdMatrix) -> Self {
        let d = at.dim();
        Self { at, vec: SymMatrix::zeros(d) }
    }

    pub fn scale(&self, c: f64) -> TangentVector {
        Self { at: self.at.clone(), vec: self.vec.scale(c) }
    }

    /// `A^{-1/2} H A^{-1/2}`: the same vector expressed at the identity.
    pub fn whitened(&self) -> SymMatrix {
        let w = self.at.inv_sqrt();
        SymMatrix::from_matrix_unchecked(w.matrix() * self.vec.matrix() * w.matrix())
    }
}

fn check_base(a: &SpdMatrix, x: &TangentVector) -> Result<()> {
    check_dims(a.dim(), x.vec.dim())?;
    if &x.at != a {
        return Err(Error::InvalidInput("tangent vector is based at a different point".into()));
    }
    Ok(())
}

/// `A^{-1/2} B A^{-1/2}`, positive-definite whenever `A` and `B` are.
pub(crate) fn whiten(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    check_dims(a.dim(), b.dim())?;
    let w = a.inv_sqrt();
    SpdMatrix::strict(w.matrix() * b.matrix() * w.matrix())
}

/// `A^{1/2} H A^{1/2}`; inverse of whitening for a tangent vector.
pub(crate) fn unwhiten(a: &SpdMatrix, h: &DMatrix<f64>) -> SymMatrix {
    let r = a.sqrt();
    SymMatrix::from_matrix_unchecked(r.matrix() * h * r.matrix())
}

/// `Tr(A⁻¹ X A⁻¹ Y)`.
pub fn metric_inner(a: &SpdMatrix, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    check_base(a, x)?;
    check_base(a, y)?;
    let xw = x.whitened();
    let yw = y.whitened();
    Ok(xw.matrix().dot(yw.matrix()))
}

pub fn tangent_norm(a: &SpdMatrix, x: &TangentVector) -> Result<f64> {
    check_base(a, x)?;
    Ok(x.whitened().frobenius_norm())
}

/// `δ(A, B) = ‖log(A^{-1/2} B A^{-1/2})‖_F`.
pub fn distance(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    let s = whiten(a, b)?;
    Ok(s.eig().values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

/// `A #ₜ B = A^{1/2} (A^{-1/2} B A^{-1/2})ᵗ A^{1/2}`.
pub fn weighted_geometric_mean(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("geometric-mean weight must lie in [0, 1], got {t}")));
    }
    if t == 0.0 {
        check_dims(a.dim(), b.dim())?;
        return Ok(a.clone());
    }
    if t == 1.0 {
        check_dims(a.dim(), b.dim())?;
        return Ok(b.clone());
    }
    geodesic_fraction(a, b, t)
}

/// `A #ₜ B` for any real `t` (extrapolates along the geodesic).
pub(crate) fn geodesic_fraction(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    let s = whiten(a, b)?.pow(t);
    let r = a.sqrt();
    SpdMatrix::strict(r.matrix() * s.matrix() * r.matrix())
}

/// Unit-speed parametrization of the geodesic from `A` (s = 0) to `B` (s = δ(A, B)).
pub fn geodesic_point(a: &SpdMatrix, b: &SpdMatrix, s: f64) -> Result<SpdMatrix> {
    let d = distance(a, b)?;
    if d <= EPS_EQ {
        return Err(Error::DegenerateGeodesic { distance: d });
    }
    if !(0.0..=d).contains(&s) {
        return Err(Error::InvalidInput(format!("arc length {s} outside [0, {d}]")));
    }
    weighted_geometric_mean(a, b, s / d)
}

/// `Exp_A(H) = A^{1/2} exp(A^{-1/2} H A^{-1/2}) A^{1/2}`.
pub fn exp_map(a: &SpdMatrix, h: &TangentVector) -> Result<SpdMatrix> {
    check_base(a, h)?;
    exp_whitened(a, &h.whitened())
}

/// `Exp_A` applied to a tangent vector already given in whitened form.
pub(crate) fn exp_whitened(a: &SpdMatrix, hw: &SymMatrix) -> Result<SpdMatrix> {
    let e = SpdMatrix::exp_of(hw)?;
    let r = a.sqrt();
    SpdMatrix::strict(r.matrix() * e.matrix() * r.matrix())
}

/// `Log_A(B) = A^{1/2} log(A^{-1/2} B A^{-1/2}) A^{1/2}`.
pub fn log_map(a: &SpdMatrix, b: &SpdMatrix) -> Result<TangentVector> {
    let l = whiten(a, b)?.log();
    Ok(TangentVector { at: a.clone(), vec: unwhiten(a, l.matrix()) })
}

/// `Γ_C(A) = C A Cᵀ` for an invertible real `C`.
pub fn congruence_transform(c: &DMatrix<f64>, a: &SpdMatrix) -> Result<SpdMatrix> {
    check_dims(a.dim(), c.nrows())?;
    check_dims(a.dim(), c.ncols())?;
    let det = c.determinant();
    if det.is_nan() || det.abs() <= DET_FLOOR {
        return Err(Error::SingularTransform { det });
    }
    SpdMatrix::strict(c * a.matrix() * c.transpose())
}

/// Riemannian gradient of `X ↦ δ(X, A)²`, i.e. `−2 Log_X(A)`.
pub fn grad_dist_sq(x: &SpdMatrix, a: &SpdMatrix) -> Result<TangentVector> {
    Ok(log_map(x, a)?.scale(-2.0))
}

/// Riemannian gradient of `X ↦ δ(X, A)`: the unit vector `−Log_X(A) / δ(X, A)`.
pub fn grad_dist(x: &SpdMatrix, a: &SpdMatrix) -> Result<TangentVector> {
    let log = log_map(x, a)?;
    let d = log.whitened().frobenius_norm();
    if d <= EPS_EQ {
        return Err(Error::AtDataPoint { distance: d });
    }
    Ok(log.scale(-1.0 / d))
}

/// Smallest eigenvalue of `B − A`; non-negative exactly when `A ≤ B` in the
/// Loewner order.
pub fn loewner_gap(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    let diff = b.sym().sub(a.sym())?;
    Ok(sym_eig(&diff)?.min())
}
