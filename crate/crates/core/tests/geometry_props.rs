mod common;

use common::{spd_from_upper, sym_from_upper};
use proptest::prelude::*;
use spd_median::geometry::{
    congruence_transform, distance, exp_map, grad_dist, grad_dist_sq, log_map, metric_inner, tangent_norm,
    weighted_geometric_mean,
};
use spd_median::nalgebra::DMatrix;
use spd_median::{SpdMatrix, TangentVector};

fn triple() -> impl Strategy<Value = (SpdMatrix, SpdMatrix, SpdMatrix)> {
    (1usize..=4).prop_flat_map(|d| {
        let m = d * (d + 1) / 2;
        (
            prop::collection::vec(-1.5f64..1.5, m),
            prop::collection::vec(-1.5f64..1.5, m),
            prop::collection::vec(-1.5f64..1.5, m),
        )
            .prop_map(move |(a, b, c)| (spd_from_upper(d, &a), spd_from_upper(d, &b), spd_from_upper(d, &c)))
    })
}

fn invertible(d: usize, entries: &[f64]) -> Option<DMatrix<f64>> {
    let c = DMatrix::from_row_slice(d, d, &entries[..d * d]);
    (c.determinant().abs() > 0.05).then_some(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_axioms((a, b, c) in triple()) {
        let ab = distance(&a, &b).unwrap();
        prop_assert!(distance(&a, &a).unwrap() < 1e-12);
        prop_assert!((ab - distance(&b, &a).unwrap()).abs() <= 1e-10 * (1.0 + ab));
        prop_assert!(distance(&a, &c).unwrap() <= ab + distance(&b, &c).unwrap() + 1e-10);
    }

    #[test]
    fn semi_parallelogram((a, b, z) in triple()) {
        let mid = weighted_geometric_mean(&a, &b, 0.5).unwrap();
        let ab = distance(&a, &b).unwrap();
        let lhs = distance(&z, &mid).unwrap().powi(2);
        let rhs = 0.5 * (distance(&z, &a).unwrap().powi(2) + distance(&z, &b).unwrap().powi(2)) - 0.25 * ab * ab;
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + ab * ab));
    }

    #[test]
    fn geodesics_have_constant_speed((a, b, _c) in triple(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let ab = distance(&a, &b).unwrap();
        let gs = weighted_geometric_mean(&a, &b, s).unwrap();
        let gt = weighted_geometric_mean(&a, &b, t).unwrap();
        prop_assert!((distance(&gs, &gt).unwrap() - (s - t).abs() * ab).abs() <= 1e-9 * (1.0 + ab));
    }

    #[test]
    fn exp_inverts_log((a, b, _c) in triple()) {
        let v = log_map(&a, &b).unwrap();
        let ab = distance(&a, &b).unwrap();
        prop_assert!(distance(&exp_map(&a, &v).unwrap(), &b).unwrap() <= 1e-9 * (1.0 + ab));
        prop_assert!((tangent_norm(&a, &v).unwrap() - ab).abs() <= 1e-10 * (1.0 + ab));
    }

    #[test]
    fn congruence_and_inversion_are_isometries((a, b, _c) in triple(), entries in prop::collection::vec(-1.0f64..1.0, 16)) {
        let d = a.dim();
        let ab = distance(&a, &b).unwrap();
        prop_assert!((distance(&a.inverse(), &b.inverse()).unwrap() - ab).abs() <= 1e-9 * (1.0 + ab));
        if let Some(c) = invertible(d, &entries) {
            let moved = distance(&congruence_transform(&c, &a).unwrap(), &congruence_transform(&c, &b).unwrap()).unwrap();
            prop_assert!((moved - ab).abs() <= 1e-9 * (1.0 + ab));
        }
    }

    #[test]
    fn distance_gradients((x, a, _c) in triple()) {
        let dist = distance(&x, &a).unwrap();
        prop_assume!(dist > 1e-3);
        let g2 = grad_dist_sq(&x, &a).unwrap();
        let log = log_map(&x, &a).unwrap();
        prop_assert!((g2.vec.matrix() + log.vec.matrix() * 2.0).norm() <= 1e-10 * (1.0 + g2.vec.frobenius_norm()));
        // unit Riemannian length, pointing away from `a`
        let g1 = grad_dist(&x, &a).unwrap();
        prop_assert!((tangent_norm(&x, &g1).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!(metric_inner(&x, &g1, &log).unwrap() < 0.0);
    }

    #[test]
    fn metric_is_symmetric_and_positive((x, _b, _c) in triple(), u in prop::collection::vec(-1.0f64..1.0, 10), v in prop::collection::vec(-1.0f64..1.0, 10)) {
        let d = x.dim();
        let m = d * (d + 1) / 2;
        let tu = TangentVector::new(x.clone(), sym_from_upper(d, &u[..m])).unwrap();
        let tv = TangentVector::new(x.clone(), sym_from_upper(d, &v[..m])).unwrap();
        let uv = metric_inner(&x, &tu, &tv).unwrap();
        prop_assert!((uv - metric_inner(&x, &tv, &tu).unwrap()).abs() <= 1e-10 * (1.0 + uv.abs()));
        prop_assert!(metric_inner(&x, &tu, &tu).unwrap() >= 0.0);
    }
}

#[test]
fn distance_of_diagonal_pair() {
    let a = SpdMatrix::identity(2);
    let b = SpdMatrix::from_diagonal(&[std::f64::consts::E.powi(3), std::f64::consts::E.powi(-4)]).unwrap();
    assert!((distance(&a, &b).unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn degenerate_gradient_is_an_error() {
    let a = SpdMatrix::identity(3);
    assert!(grad_dist(&a, &a).is_err());
}
