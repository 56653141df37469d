#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spd_median::geometry::{exp_map, weighted_geometric_mean};
use spd_median::nalgebra::{DMatrix, DVector};
use spd_median::{SpdMatrix, SpdTuple, SymMatrix, TangentVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sym(rng: &mut impl Rng, d: usize, scale: f64) -> SymMatrix {
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = rng.gen_range(-1.0..1.0) * scale;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymMatrix::new(m).unwrap()
}

/// `exp(H)` with `H` uniform in `[-scale, scale]` entrywise.
pub fn random_spd(rng: &mut impl Rng, d: usize, scale: f64) -> SpdMatrix {
    SpdMatrix::exp_of(&random_sym(rng, d, scale)).unwrap()
}

pub fn random_orthogonal(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let m: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

/// Invertible matrix with entries in `[-1, 1]` and `|det| ≥ 0.05`.
pub fn random_invertible(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    loop {
        let c: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        if c.determinant().abs() >= 0.05 {
            return c;
        }
    }
}

pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|w| w / s).collect()
}

pub fn random_tuple(rng: &mut impl Rng, d: usize, n: usize, weighted: bool) -> SpdTuple {
    let points = (0..n).map(|_| random_spd(rng, d, 1.0)).collect();
    if weighted {
        SpdTuple::with_unnormalized_weights(points, random_weights(rng, n)).unwrap()
    } else {
        SpdTuple::new(points).unwrap()
    }
}

/// Points `P #_{t_k} Q` on the geodesic through two random SPD matrices.
pub fn collinear_tuple(rng: &mut impl Rng, d: usize, ts: &[f64]) -> (SpdMatrix, SpdMatrix, SpdTuple) {
    let p = random_spd(rng, d, 1.0);
    let h = random_sym(rng, d, 1.0);
    let q = exp_map(&p, &TangentVector::new(p.clone(), h).unwrap()).unwrap();
    let pts = ts.iter().map(|&t| on_geodesic(&p, &q, t)).collect();
    (p.clone(), q, SpdTuple::new(pts).unwrap())
}

/// `P #_t Q`, also for `t` outside `[0, 1]`.
pub fn on_geodesic(p: &SpdMatrix, q: &SpdMatrix, t: f64) -> SpdMatrix {
    if (0.0..=1.0).contains(&t) {
        return weighted_geometric_mean(p, q, t).unwrap();
    }
    let r = p.sqrt();
    let ri = p.inv_sqrt();
    let s = SpdMatrix::new(SymMatrix::new(ri.matrix() * q.matrix() * ri.matrix()).unwrap())
        .unwrap()
        .pow(t);
    SpdMatrix::new(SymMatrix::new(r.matrix() * s.matrix() * r.matrix()).unwrap()).unwrap()
}

/// Commuting tuple `Q diag(exp(x_k)) Qᵀ` together with `Q` and the log
/// coordinates `x_k`.
pub struct Commuting {
    pub tuple: SpdTuple,
    pub basis: DMatrix<f64>,
    pub coords: Vec<Vec<f64>>,
}

impl Commuting {
    /// `Q diag(exp(x)) Qᵀ`.
    pub fn lift(&self, x: &[f64]) -> SpdMatrix {
        let diag = DVector::from_iterator(x.len(), x.iter().map(|v| v.exp()));
        let m = &self.basis * DMatrix::from_diagonal(&diag) * self.basis.transpose();
        SpdMatrix::new(SymMatrix::new(m).unwrap()).unwrap()
    }
}

pub fn commuting_tuple(rng: &mut impl Rng, d: usize, n: usize, weighted: bool) -> Commuting {
    let basis = random_orthogonal(rng, d);
    let coords: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let mut c = Commuting { tuple: SpdTuple::new(vec![SpdMatrix::identity(d)]).unwrap(), basis, coords };
    let points = c.coords.iter().map(|x| c.lift(x)).collect();
    c.tuple = if weighted {
        SpdTuple::with_unnormalized_weights(points, random_weights(rng, n)).unwrap()
    } else {
        SpdTuple::new(points).unwrap()
    };
    c
}

pub fn fermat_tuple(fourth: bool) -> SpdTuple {
    let e = std::f64::consts::E;
    let third = if fourth { [e.powi(10), e.powi(10)] } else { [e.powi(10), 1.0] };
    SpdTuple::new(vec![
        SpdMatrix::identity(2),
        SpdMatrix::from_diagonal(&[e * e, e.powi(4)]).unwrap(),
        SpdMatrix::from_diagonal(&third).unwrap(),
    ])
    .unwrap()
}

pub fn fermat_log_coords() -> [f64; 2] {
    let s3 = 3f64.sqrt();
    [(14.0 + 10.0 * s3) / 13.0, (54.0 + 20.0 * s3) / 39.0]
}

/// `exp(S)` where `S` is filled from `upper` (row-major upper triangle).
pub fn spd_from_upper(d: usize, upper: &[f64]) -> SpdMatrix {
    SpdMatrix::exp_of(&sym_from_upper(d, upper)).unwrap()
}

pub fn sym_from_upper(d: usize, upper: &[f64]) -> SymMatrix {
    let mut m = DMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in i..d {
            m[(i, j)] = upper[k];
            m[(j, i)] = upper[k];
            k += 1;
        }
    }
    SymMatrix::new(m).unwrap()
}
