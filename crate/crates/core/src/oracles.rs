//! Euclidean reference solvers for cross-checking the manifold estimators.
//!
//! Nothing here calls into `geometry` or `estimators`; agreement between these
//! solvers and the manifold code is therefore independent evidence.

use crate::error::{Error, Result};
use crate::estimators::SpdTuple;
use crate::par::{map_indexed, Execution};
use crate::symfun::SpdMatrix;

const COINCIDE: f64 = 1e-14;
const WEISZFELD_MAX_ITER: usize = 200_000;
/// Relative distance from the fitted line below which a point set counts as collinear.
const LINE_TOL: f64 = 1e-12;

/// Weighted points in `ℝ^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanPointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl EuclideanPointSet {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point set must be non-empty".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have positive dimension".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if weights.len() != points.len() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Weights("need one positive weight per point".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Weights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { dim, points, weights })
    }

    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len().max(1);
        Self::new(points, vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_k ‖x − a_k‖`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.points.iter().zip(&self.weights).map(|(a, w)| w * dist(x, a)).sum()
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Resultant pull `Σ w_j (a_j − x)/‖a_j − x‖` over non-coincident points, and
/// the total weight of points coinciding with `x`.
fn pull(set: &EuclideanPointSet, x: &[f64], scale: f64) -> (Vec<f64>, f64) {
    let mut r = vec![0.0; set.dim];
    let mut mass = 0.0;
    for (a, w) in set.points.iter().zip(&set.weights) {
        let d = dist(x, a);
        if d <= COINCIDE * scale {
            mass += w;
            continue;
        }
        for (ri, (ai, xi)) in r.iter_mut().zip(a.iter().zip(x)) {
            *ri += w * (ai - xi) / d;
        }
    }
    (r, mass)
}

/// Weighted Euclidean geometric median by Weiszfeld's iteration.
///
/// Data points are first screened with the vertex optimality test (resultant
/// pull of the other points no larger than the point's own weight). Iterates
/// that land on a data point take the Vardi–Zhang modified step. Stops when
/// the resultant pull drops to `tol`.
///
/// Collinear sets are solved on the line. When the weight splits exactly in
/// half the minimizers form a segment; the point returned is the limit of the
/// `Σ w_k |x − a_k|^p` minimizers as `p ↘ 1`, the root of
/// `Σ_left w_k ln(x − t_k) = Σ_right w_k ln(t_k − x)` inside the segment.
pub fn euclidean_geometric_median(set: &EuclideanPointSet, tol: f64) -> Result<Vec<f64>> {
    let scale = set.points.iter().map(|p| norm(p)).fold(1.0f64, f64::max);
    if let Some(x) = collinear_median(set, scale)? {
        return Ok(x);
    }
    for a in &set.points {
        let (r, mass) = pull(set, a, scale);
        if norm(&r) <= mass {
            return Ok(a.clone());
        }
    }

    let mut x = vec![0.0; set.dim];
    for (a, w) in set.points.iter().zip(&set.weights) {
        for (xi, ai) in x.iter_mut().zip(a) {
            *xi += w * ai;
        }
    }

    for _ in 0..WEISZFELD_MAX_ITER {
        let (r, mass) = pull(set, &x, scale);
        let rn = norm(&r);
        if mass == 0.0 && rn <= tol {
            return Ok(x);
        }
        if mass > 0.0 && rn <= mass {
            return Ok(x);
        }
        let mut num = vec![0.0; set.dim];
        let mut den = 0.0;
        for (a, w) in set.points.iter().zip(&set.weights) {
            let d = dist(&x, a);
            if d <= COINCIDE * scale {
                continue;
            }
            den += w / d;
            for (ni, ai) in num.iter_mut().zip(a) {
                *ni += w * ai / d;
            }
        }
        let t: Vec<f64> = num.iter().map(|v| v / den).collect();
        let next: Vec<f64> = if mass > 0.0 {
            let eta = (mass / rn).min(1.0);
            t.iter().zip(&x).map(|(ti, xi)| (1.0 - eta) * ti + eta * xi).collect()
        } else {
            t
        };
        if dist(&next, &x) <= f64::EPSILON * (1.0 + norm(&x)) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence)
}

fn collinear_median(set: &EuclideanPointSet, scale: f64) -> Result<Option<Vec<f64>>> {
    let base = &set.points[0];
    let (far, len) = set
        .points
        .iter()
        .map(|a| (a, dist(a, base)))
        .fold((base, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if len <= COINCIDE * scale {
        return Ok(Some(base.clone()));
    }
    let u: Vec<f64> = far.iter().zip(base).map(|(f, b)| (f - b) / len).collect();
    let mut ts = Vec::with_capacity(set.points.len());
    for a in &set.points {
        let t: f64 = a.iter().zip(base).zip(&u).map(|((ai, bi), ui)| (ai - bi) * ui).sum();
        let off: Vec<f64> = a.iter().zip(base).zip(&u).map(|((ai, bi), ui)| ai - bi - t * ui).collect();
        if norm(&off) > LINE_TOL * scale {
            return Ok(None);
        }
        ts.push(t);
    }
    let (lo, hi) = scalar_weighted_median_interval(&ts, &set.weights)?;
    if hi == lo {
        let k = ts.iter().position(|&t| t == lo).expect("interval endpoint is a data value");
        return Ok(Some(set.points[k].clone()));
    }
    let balance = |x: f64| -> f64 {
        ts.iter()
            .zip(&set.weights)
            .map(|(&t, w)| if t <= lo { w * (x - t).ln() } else { -w * (t - x).ln() })
            .sum()
    };
    let (mut a, mut b) = (lo, hi);
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if balance(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    Ok(Some(base.iter().zip(&u).map(|(bi, ui)| bi + x * ui).collect()))
}

/// Closed interval `[lo, hi]` of minimizers of `t ↦ Σ w_k |t − t_k|`.
pub fn scalar_weighted_median_interval(ts: &[f64], weights: &[f64]) -> Result<(f64, f64)> {
    if ts.is_empty() || ts.len() != weights.len() {
        return Err(Error::InvalidInput("need one weight per value and at least one value".into()));
    }
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));
    let total: f64 = weights.iter().sum();
    let half = 0.5 * total;
    let mut cum = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        cum += weights[i];
        if (cum - half).abs() <= 1e-12 * total {
            // exact half split: the interval runs to the next distinct value
            let hi = order[pos + 1..].iter().map(|&j| ts[j]).find(|&t| t > ts[i]).unwrap_or(ts[i]);
            return Ok((ts[i], hi));
        }
        if cum > half {
            return Ok((ts[i], ts[i]));
        }
    }
    let last = ts[order[order.len() - 1]];
    Ok((last, last))
}

/// Fermat point (minimizer of the summed distances to three vertices).
///
/// Returns the vertex whose interior angle is at least 120°, otherwise the
/// isogonic point from the equilateral-triangle construction. Collinear
/// vertices give [`Error::DegenerateTriangle`] carrying the middle point.
pub fn fermat_point(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Result<[f64; 2]> {
    let scale = [a, b, c].iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let area2 = cross(sub(b, a), sub(c, a));
    if area2.abs() <= 1e-12 * scale * scale {
        let mut v = [a, b, c];
        let axis = if (v[0][0] - v[1][0]).abs() + (v[0][0] - v[2][0]).abs() > 0.0 { 0 } else { 1 };
        v.sort_by(|p, q| p[axis].total_cmp(&q[axis]));
        return Err(Error::DegenerateTriangle { fallback: v[1] });
    }
    for (v, p, q) in [(a, b, c), (b, c, a), (c, a, b)] {
        let (u, w) = (sub(p, v), sub(q, v));
        let cos = dot(u, w) / (dot(u, u).sqrt() * dot(w, w).sqrt());
        if cos <= -0.5 {
            return Ok(v);
        }
    }
    let a_apex = outer_apex(b, c, a);
    let b_apex = outer_apex(c, a, b);
    Ok(intersect(a, a_apex, b, b_apex))
}

fn sub(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    [p[0] - q[0], p[1] - q[1]]
}

fn dot(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[0] + p[1] * q[1]
}

fn cross(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[1] - p[1] * q[0]
}

/// Apex of the equilateral triangle erected on `pq` away from `opposite`.
fn outer_apex(p: [f64; 2], q: [f64; 2], opposite: [f64; 2]) -> [f64; 2] {
    let e = sub(q, p);
    let h = 3f64.sqrt() / 2.0;
    let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
    let normal = [-e[1] * h, e[0] * h];
    let side = cross(e, sub(opposite, p));
    if side > 0.0 {
        [mid[0] - normal[0], mid[1] - normal[1]]
    } else {
        [mid[0] + normal[0], mid[1] + normal[1]]
    }
}

/// Intersection of line `p1 → p2` with line `q1 → q2`.
fn intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> [f64; 2] {
    let r = sub(p2, p1);
    let s = sub(q2, q1);
    let t = cross(sub(q1, p1), s) / cross(r, s);
    [p1[0] + t * r[0], p1[1] + t * r[1]]
}

/// Axis-aligned search grid `lo, lo + step, …, ≤ hi` on both log-coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    fn nodes(&self) -> usize {
        if !(self.step > 0.0 && self.hi >= self.lo && self.lo.is_finite() && self.hi.is_finite()) {
            return 0;
        }
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }
}

/// Best grid node found by [`brute_force_grid_minimizer`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridMinimum {
    pub matrix: SpdMatrix,
    pub log_coords: [f64; 2],
    pub objective: f64,
}

/// Exhaustive minimization of `F₁` over `diag(eˣ, eʸ)` for tuples of diagonal
/// 2×2 matrices. Accuracy is bounded by the grid step.
pub fn brute_force_grid_minimizer(tuple: &SpdTuple, grid: &GridSpec) -> Result<GridMinimum> {
    if tuple.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: tuple.dim() });
    }
    let mut logs = Vec::with_capacity(tuple.len());
    for a in tuple.points() {
        let m = a.sym();
        if m.get(0, 1).abs() > 1e-12 * m.max_abs() {
            return Err(Error::InvalidInput("grid oracle requires diagonal matrices".into()));
        }
        logs.push([m.get(0, 0).ln(), m.get(1, 1).ln()]);
    }
    let n = grid.nodes();
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    let weights = tuple.weights();
    let coord = |i: usize| grid.lo + i as f64 * grid.step;
    let f = |x: f64, y: f64| -> f64 {
        logs.iter().zip(weights).map(|(a, w)| w * ((x - a[0]).powi(2) + (y - a[1]).powi(2)).sqrt()).sum()
    };
    let rows = map_indexed(Execution::Auto, n, |i| {
        let x = coord(i);
        let mut best = (f64::INFINITY, 0usize);
        for j in 0..n {
            let v = f(x, coord(j));
            if v < best.0 {
                best = (v, j);
            }
        }
        best
    });
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for (i, (v, j)) in rows.into_iter().enumerate() {
        if v < best.0 {
            best = (v, i, j);
        }
    }
    let log_coords = [coord(best.1), coord(best.2)];
    Ok(GridMinimum {
        matrix: SpdMatrix::from_diagonal(&[log_coords[0].exp(), log_coords[1].exp()])?,
        log_coords,
        objective: best.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    fn fermat_abc() -> ([f64; 2], [f64; 2]) {
        let s3 = 3f64.sqrt();
        ([(14.0 + 10.0 * s3) / 13.0, (54.0 + 20.0 * s3) / 39.0], [2.0, 4.0])
    }

    #[test]
    fn weiszfeld_fermat_triangle() {
        let set = EuclideanPointSet::uniform(vec![vec![0.0, 0.0], vec![2.0, 4.0], vec![10.0, 0.0]]).unwrap();
        let x = euclidean_geometric_median(&set, 1e-12).unwrap();
        let (expect, _) = fermat_abc();
        assert!((x[0] - expect[0]).abs() < 1e-10 && (x[1] - expect[1]).abs() < 1e-10, "{x:?}");
    }

    #[test]
    fn weiszfeld_obtuse_vertex() {
        let set = EuclideanPointSet::uniform(vec![vec![0.0, 0.0], vec![2.0, 4.0], vec![10.0, 10.0]]).unwrap();
        assert_eq!(euclidean_geometric_median(&set, 1e-12).unwrap(), vec![2.0, 4.0]);
    }

    #[test]
    fn weiszfeld_collinear_odd() {
        let set = EuclideanPointSet::uniform(vec![vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        assert_eq!(euclidean_geometric_median(&set, 1e-12).unwrap(), vec![1.0]);
    }

    #[test]
    fn weiszfeld_tied_pair_gives_midpoint() {
        let set = EuclideanPointSet::uniform(vec![vec![1.0, -2.0], vec![3.0, 4.0]]).unwrap();
        let x = euclidean_geometric_median(&set, 1e-12).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14, "{x:?}");
    }

    #[test]
    fn weiszfeld_tied_collinear_balances_logs() {
        // points at 0, 1, 2, 10 along a line in the plane
        let dir = [0.6, 0.8];
        let pts = [0.0, 1.0, 2.0, 10.0].iter().map(|t| vec![t * dir[0], t * dir[1]]).collect();
        let x = euclidean_geometric_median(&EuclideanPointSet::uniform(pts).unwrap(), 1e-12).unwrap();
        let t = x[0] / dir[0];
        assert!((x[1] - t * dir[1]).abs() < 1e-12);
        assert!(t > 1.0 && t < 2.0);
        let balance = t.ln() + (t - 1.0).ln() - (2.0 - t).ln() - (10.0 - t).ln();
        assert!(balance.abs() < 1e-12, "{balance}");
    }

    #[test]
    fn scalar_interval_examples() {
        let u3 = [1.0 / 3.0; 3];
        assert_eq!(scalar_weighted_median_interval(&[0.0, 1.0, 2.0], &u3).unwrap(), (1.0, 1.0));
        let u4 = [0.25; 4];
        assert_eq!(scalar_weighted_median_interval(&[0.0, 1.0, 2.0, 3.0], &u4).unwrap(), (1.0, 2.0));
        let w = [0.4, 0.3, 0.2, 0.1];
        assert_eq!(scalar_weighted_median_interval(&[0.0, 1.0, 2.0, 3.0], &w).unwrap(), (1.0, 1.0));
        // unsorted input
        assert_eq!(scalar_weighted_median_interval(&[3.0, 0.0, 2.0, 1.0], &u4).unwrap(), (1.0, 2.0));
    }

    #[test]
    fn scalar_interval_matches_grid_search() {
        let ts = [0.0, 1.0, 2.0, 3.0];
        let w = [0.4, 0.3, 0.2, 0.1];
        let f = |t: f64| ts.iter().zip(&w).map(|(a, b)| b * (t - a).abs()).sum::<f64>();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=3000 {
            let t = i as f64 * 1e-3;
            if f(t) < best.0 - 1e-15 {
                best = (f(t), t);
            }
        }
        assert_eq!(best.1, 1.0);
    }

    #[test]
    fn fermat_equilateral_is_centroid() {
        let h = 3f64.sqrt() / 2.0;
        let p = fermat_point([0.0, 0.0], [1.0, 0.0], [0.5, h]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-14 && (p[1] - h / 3.0).abs() < 1e-14);
    }

    #[test]
    fn fermat_examples() {
        let (inner, vertex) = fermat_abc();
        let p = fermat_point([0.0, 0.0], [2.0, 4.0], [10.0, 0.0]).unwrap();
        assert!((p[0] - inner[0]).abs() < 1e-12 && (p[1] - inner[1]).abs() < 1e-12);
        assert_eq!(fermat_point([0.0, 0.0], [2.0, 4.0], [10.0, 10.0]).unwrap(), vertex);
    }

    #[test]
    fn fermat_collinear_falls_back() {
        assert_eq!(
            fermat_point([0.0, 0.0], [5.0, 5.0], [1.0, 1.0]),
            Err(Error::DegenerateTriangle { fallback: [1.0, 1.0] })
        );
    }

    #[test]
    fn grid_examples() {
        let d = |x: f64, y: f64| SpdMatrix::from_diagonal(&[x.exp(), y.exp()]).unwrap();
        let grid = GridSpec { lo: 0.0, hi: 10.0, step: 0.01 };
        let single = SpdTuple::new(vec![d(1.234, 5.678)]).unwrap();
        let g = brute_force_grid_minimizer(&single, &grid).unwrap();
        assert!((g.log_coords[0] - 1.23).abs() < 1e-9 && (g.log_coords[1] - 5.68).abs() < 1e-9);

        let sym4 = SpdTuple::new((0..4).map(|k| d(k as f64, k as f64)).collect()).unwrap();
        // F₁ is flat along the middle segment, so any node on it is optimal
        let g = brute_force_grid_minimizer(&sym4, &grid).unwrap();
        let [x, y] = g.log_coords;
        assert!((x - y).abs() < 1e-9 && (1.0..=2.0).contains(&x), "{x} {y}");

        let fermat = SpdTuple::new(vec![d(0.0, 0.0), d(2.0, 4.0), d(10.0, 0.0)]).unwrap();
        let g = brute_force_grid_minimizer(&fermat, &grid).unwrap();
        let (expect, _) = fermat_abc();
        assert!(((g.log_coords[0] - expect[0]).powi(2) + (g.log_coords[1] - expect[1]).powi(2)).sqrt() < 0.02);
        assert_eq!(g.matrix.sym().get(0, 0), g.log_coords[0].exp());
    }

    #[test]
    fn grid_rejects_empty_and_non_diagonal() {
        let t = SpdTuple::new(vec![SpdMatrix::identity(2)]).unwrap();
        assert_eq!(
            brute_force_grid_minimizer(&t, &GridSpec { lo: 1.0, hi: 0.0, step: 0.1 }),
            Err(Error::EmptyGrid)
        );
        let nd = SpdTuple::new(vec![SpdMatrix::from_row_major(2, &[2.0, 0.5, 0.5, 1.0]).unwrap()]).unwrap();
        assert!(brute_force_grid_minimizer(&nd, &GridSpec { lo: 0.0, hi: 1.0, step: 0.1 }).is_err());
    }
}
