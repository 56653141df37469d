use nalgebra::DMatrix;

use super::SpdTuple;
use crate::oracles::{euclidean_geometric_median, EuclideanPointSet};
use crate::symfun::{sym_eig, SpdMatrix, SymMatrix};

/// Relative tolerance for the commutator and diagonalization tests.
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-10;
const WEISZFELD_TOL: f64 = 1e-12;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Median of a mutually commuting tuple through its log-eigenvalue coordinates.
///
/// Returns `None` when the points do not commute.
pub fn commuting_fast_path(tuple: &SpdTuple) -> Option<SpdMatrix> {
    commuting_fast_path_with_tol(tuple, DEFAULT_COMMUTE_TOL)
}

pub fn commuting_fast_path_with_tol(tuple: &SpdTuple, commute_tol: f64) -> Option<SpdMatrix> {
    let pts = tuple.points();
    let scale = pts.iter().map(|a| a.sym().max_abs()).fold(0.0f64, f64::max);
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let (a, b) = (pts[i].matrix(), pts[j].matrix());
            if (a * b - b * a).amax() > commute_tol * scale * scale {
                return None;
            }
        }
    }

    let basis = common_eigenbasis(tuple, commute_tol)?;
    let coords: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| (basis.transpose() * a.log().matrix() * &basis).diagonal().iter().copied().collect())
        .collect();
    let set = EuclideanPointSet::new(coords, tuple.weights().to_vec()).ok()?;
    let x = euclidean_geometric_median(&set, WEISZFELD_TOL).ok()?;

    let mut scaled = basis.clone();
    for (j, v) in x.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v.exp());
    }
    SpdMatrix::strict(scaled * basis.transpose()).ok()
}

/// Orthogonal basis that diagonalizes every point, taken from the eigenbasis of
/// a weighted combination. The plain weighted sum is tried first; when its
/// spectrum is degenerate in a way the individual points are not, a second
/// combination with distinct generic coefficients separates them.
fn common_eigenbasis(tuple: &SpdTuple, commute_tol: f64) -> Option<DMatrix<f64>> {
    let d = tuple.dim();
    let coefficient_sets: [Box<dyn Fn(usize, f64) -> f64>; 2] = [
        Box::new(|_, w| w),
        Box::new(|k, w| w * (1.0 + ((k + 1) as f64 * GOLDEN).fract())),
    ];
    for coeff in coefficient_sets.iter() {
        let mut sum = DMatrix::zeros(d, d);
        for (k, (a, w)) in tuple.points().iter().zip(tuple.weights()).enumerate() {
            sum += a.log().matrix() * coeff(k, *w);
        }
        let q = sym_eig(&SymMatrix::new(sum).ok()?).ok()?.vectors;
        let diagonalizes = tuple.points().iter().all(|a| {
            let m = q.transpose() * a.matrix() * &q;
            let off = (0..d)
                .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
                .fold(0.0f64, |acc, (i, j)| acc.max(m[(i, j)].abs()));
            off <= commute_tol * a.sym().max_abs().max(1.0)
        });
        if diagonalizes {
            return Some(q);
        }
    }
    None
}
