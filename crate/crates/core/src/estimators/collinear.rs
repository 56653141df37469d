use super::SpdTuple;
use crate::geometry::{distance, geodesic_point, log_map, metric_inner, EPS_EQ};
use crate::par::{map_indexed, Execution};
use crate::symfun::SpdMatrix;

/// Default residual tolerance for [`check_collinear`].
pub const DEFAULT_COLLINEAR_TOL: f64 = 1e-8;

/// Evidence that every point of a tuple lies on the geodesic from `p` to `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCertificate {
    pub p: SpdMatrix,
    pub q: SpdMatrix,
    /// `δ(p, q)`; zero for a tuple of identical points.
    pub length: f64,
    /// Arc-length coordinate of each point, in input order.
    pub coords: Vec<f64>,
    /// Largest distance from a point to its foot on the geodesic.
    pub max_residual: f64,
}

impl GeodesicCertificate {
    pub fn is_degenerate(&self) -> bool {
        self.length == 0.0
    }

    /// Coordinates in ascending order.
    pub fn sorted_coords(&self) -> Vec<f64> {
        let mut c = self.coords.clone();
        c.sort_by(f64::total_cmp);
        c
    }
}

/// Tests whether the tuple lies on a single geodesic.
///
/// The two mutually farthest points span the candidate geodesic; every point is
/// projected onto it through the tangent space at the first endpoint and must
/// lie within `collinear_tol` of its projection.
pub fn check_collinear(tuple: &SpdTuple, collinear_tol: f64) -> Option<GeodesicCertificate> {
    let pts = tuple.points();
    let n = pts.len();
    let rows = map_indexed(Execution::Auto, n, |i| {
        let mut best = (0.0f64, i);
        for j in (i + 1)..n {
            let d = distance(&pts[i], &pts[j]).ok()?;
            if d > best.0 {
                best = (d, j);
            }
        }
        Some(best)
    });
    let mut far = (0.0f64, 0usize, 0usize);
    for (i, row) in rows.into_iter().enumerate() {
        let (d, j) = row?;
        if d > far.0 {
            far = (d, i, j);
        }
    }
    let (length, i, j) = far;
    if length <= EPS_EQ {
        return Some(GeodesicCertificate {
            p: pts[0].clone(),
            q: pts[0].clone(),
            length: 0.0,
            coords: vec![0.0; n],
            max_residual: length,
        });
    }
    let (p, q) = (&pts[i], &pts[j]);
    let dir = log_map(p, q).ok()?;
    let feet = map_indexed(Execution::Auto, n, |k| {
        let v = log_map(p, &pts[k]).ok()?;
        let t = (metric_inner(p, &v, &dir).ok()? / length).clamp(0.0, length);
        let residual = distance(&pts[k], &geodesic_point(p, q, t).ok()?).ok()?;
        Some((t, residual))
    });
    let mut coords = Vec::with_capacity(n);
    let mut max_residual = 0.0f64;
    for foot in feet {
        let (t, r) = foot?;
        if r > collinear_tol {
            return None;
        }
        coords.push(t);
        max_residual = max_residual.max(r);
    }
    Some(GeodesicCertificate { p: p.clone(), q: q.clone(), length, coords, max_residual })
}
