mod common;

use jetgeo_core::lorenz5::{
    closed_connection, closed_em, closed_eym, closed_eym_expanded, closed_jacobian, closed_torsion, cylinder_point,
    rhs, LEVEL_TOLERANCE,
};
use jetgeo_core::{
    classify_level_set, eval_field, lorenz_field, rotation_matrix, GeometryReport, LevelSetClass, Matrix,
};
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

const P: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];

/// EYM at a point of R^5 built from `(x1, x3, x5)` with the free `x2 = x4 = 0`.
fn eym_at(p: [f64; 3], eps: f64) -> f64 {
    closed_eym(&[p[0], 0.0, p[1], 0.0, p[2]], eps)
}

#[test]
fn field_values() {
    assert_eq!(
        eval_field(&lorenz_field(0.1), &P).unwrap(),
        vec![-5.0, 2.5, -2.0, -5.0, 4.2]
    );
    assert_eq!(rhs(&P, 0.1), [-5.0, 2.5, -2.0, -5.0, 4.2]);
    for eps in [0.0, 0.7] {
        assert_eq!(eval_field(&lorenz_field(eps), &[0.0; 5]).unwrap(), vec![0.0; 5]);
    }
}

#[test]
fn jacobian_at_the_reference_point() {
    #[rustfmt::skip]
    let expected = Matrix::from_row_slice(5, 5, &[
        0.0, -2.5, -2.0, 0.0, 0.2,
        2.5, 0.0, 1.0, 0.0, -0.1,
        -2.0, -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, -1.0,
        0.2, 0.1, 0.0, 1.0, 0.0,
    ]);
    let r = GeometryReport::compute(&lorenz_field(0.1), &P).unwrap();
    assert!(common::max_abs(&(&r.jacobian - &expected)) <= 1e-15);
    assert!(common::max_abs(&(closed_jacobian(&P, 0.1) - &expected)) <= 1e-15);
}

#[test]
fn connection_and_em_at_the_reference_point() {
    let mut expected = Matrix::zeros(5, 5);
    for (i, j, v) in [(1, 2, 2.5), (2, 3, -1.0), (2, 5, 0.1), (4, 5, 1.0)] {
        expected[(i - 1, j - 1)] = v;
        expected[(j - 1, i - 1)] = -v;
    }
    let r = GeometryReport::compute(&lorenz_field(0.1), &P).unwrap();
    assert!(common::max_abs(&(&r.connection - &expected)) <= 1e-15);
    assert!(common::max_abs(&(closed_connection(&P, 0.1) - &expected)) <= 1e-15);
    assert!(common::max_abs(&(&r.em + &expected)) <= 1e-15);
    assert!(common::max_abs(&(closed_em(&P, 0.1) + &expected)) <= 1e-15);
    assert!((r.eym - 8.26).abs() <= 1e-12);
    assert!((closed_eym(&P, 0.1) - 8.26).abs() <= 1e-12);
}

#[test]
fn connection_at_the_origin() {
    let n = closed_connection(&[0.0; 5], 0.4);
    for i in 0..5 {
        for j in 0..5 {
            let expected = match (i, j) {
                (3, 4) => 1.0,
                (4, 3) => -1.0,
                _ => 0.0,
            };
            assert_eq!(n[(i, j)], expected, "({i},{j})");
        }
    }
    assert_eq!(closed_eym(&[0.0; 5], 0.4), 1.0);
}

/// Nonzero torsion entries `(k, i, j, value)` with `R_k(i, j) = dN_ij/dx_k`,
/// listed by hand from the connection `N_12 = x3 - eps*x5`, `N_23 = -x1`,
/// `N_25 = eps*x1`, `N_45 = 1`.
fn hand_torsion(eps: f64) -> Vec<(usize, usize, usize, f64)> {
    vec![
        (1, 3, 2, 1.0),
        (1, 2, 3, -1.0),
        (1, 5, 2, -eps),
        (1, 2, 5, eps),
        (3, 2, 1, -1.0),
        (3, 1, 2, 1.0),
        (5, 2, 1, eps),
        (5, 1, 2, -eps),
    ]
}

#[test]
fn torsion_entries() {
    for eps in [0.0, 0.1, 1.0] {
        let closed = closed_torsion(eps);
        let generic = GeometryReport::compute(&lorenz_field(eps), &[0.3, -1.2, 2.0, 0.7, -0.4])
            .unwrap()
            .torsion;
        let mut expected = vec![Matrix::zeros(5, 5); 5];
        for (k, i, j, v) in hand_torsion(eps) {
            expected[k - 1][(i - 1, j - 1)] = v;
        }
        for k in 0..5 {
            assert_eq!(closed[k], expected[k], "closed k={}", k + 1);
            assert!(
                common::max_abs(&(&generic[k] - &expected[k])) <= 1e-15,
                "generic k={}",
                k + 1
            );
        }
    }
    let zero_eps = closed_torsion(0.0);
    let nonzero: usize = zero_eps.iter().map(|m| m.iter().filter(|v| **v != 0.0).count()).sum();
    assert_eq!(nonzero, 4);
}

#[test]
fn rotation_matrix_entries() {
    #[rustfmt::skip]
    assert_eq!(rotation_matrix(0.0), Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0));
    let h = 1.0 / 2f64.sqrt();
    let m = rotation_matrix(1.0);
    let expected = Matrix3::new(0.0, 1.0, 0.0, h, 0.0, h, h, 0.0, -h);
    assert!((m - expected).amax() <= 1e-16);
}

#[test]
fn level_set_cases() {
    assert_eq!(classify_level_set(0.5, 0.2), LevelSetClass::Empty);
    match classify_level_set(1.0, 0.3) {
        LevelSetClass::Line(line) => {
            assert_eq!(line.constraints(), "x1 = 0, x3 = 0.3*x5");
            assert!(line.contains([0.0, 0.6, 2.0], 1e-15));
            let d = line.direction;
            assert!((d[1] - 0.3 * d[2]).abs() <= 1e-16 && d[0] == 0.0);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        classify_level_set(1.0 + 0.5 * LEVEL_TOLERANCE, 2.0),
        LevelSetClass::Line(_)
    ));
    assert!(matches!(
        classify_level_set(1.0 + 3.0 * LEVEL_TOLERANCE, 2.0),
        LevelSetClass::Cylinder { .. }
    ));
    match classify_level_set(5.0, 1.0) {
        LevelSetClass::Cylinder { radius, .. } => assert!((radius - 2f64.sqrt()).abs() <= 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn level_set_json() {
    let v = serde_json::to_value(classify_level_set(5.0, 1.0)).unwrap();
    assert_eq!(v["case"], "cylinder");
    assert_eq!(v["radius"], std::f64::consts::SQRT_2);
    assert_eq!(v["free_coordinates"], serde_json::json!(["x2", "x4"]));
    assert_eq!(v["tolerance"], 1e-12);
    assert_eq!(
        serde_json::to_value(classify_level_set(0.5, 1.0)).unwrap()["case"],
        "empty"
    );
}

proptest! {
    #[test]
    fn rotation_is_orthogonal(eps in -10.0..10.0f64) {
        let m = rotation_matrix(eps);
        prop_assert!((m.transpose() * m - Matrix3::identity()).amax() <= 1e-14);
    }

    #[test]
    fn canonical_form(eps in -3.0..3.0f64, big_x in prop::array::uniform3(-5.0..5.0f64)) {
        let p = rotation_matrix(eps) * Vector3::from(big_x);
        let lhs = eym_at([p[0], p[1], p[2]], eps) - 1.0;
        let rhs = (1.0 + eps * eps) * (big_x[1] * big_x[1] + big_x[2] * big_x[2]);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn cylinder_membership(eps in -3.0..3.0f64, c in 1.0..50.0f64, along in -5.0..5.0f64, theta in 0.0..std::f64::consts::TAU) {
        let LevelSetClass::Cylinder { radius, .. } = classify_level_set(c, eps) else {
            return Ok(());
        };
        let p = cylinder_point(radius, eps, along, theta);
        prop_assert!((eym_at(p, eps) - c).abs() <= 1e-10);
    }

    #[test]
    fn eym_is_at_least_one(eps in -3.0..3.0f64, x in prop::array::uniform5(-5.0..5.0f64)) {
        let e = closed_eym(&x, eps);
        prop_assert!(e >= 1.0);
        prop_assert!((e - closed_eym_expanded(&x, eps)).abs() <= 1e-12 * e);
    }

    #[test]
    fn eym_is_one_on_the_line(eps in -3.0..3.0f64, s in -5.0..5.0f64, x2 in -5.0..5.0f64, x4 in -5.0..5.0f64) {
        let x = [0.0, x2, eps * s, x4, s];
        prop_assert!((closed_eym(&x, eps) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn eym_minimum_on_a_grid() {
    let eps = 0.4;
    let mut min = f64::INFINITY;
    let steps: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.5).collect();
    for &a in &steps {
        for &b in &steps {
            for &c in &steps {
                let e = closed_eym(&[a, 1.0, b, -2.0, c], eps);
                assert!(e >= 1.0);
                if (e - 1.0).abs() <= 1e-12 {
                    assert!(a == 0.0 && (b - eps * c).abs() <= 1e-12);
                }
                min = min.min(e);
            }
        }
    }
    assert_eq!(min, 1.0);
}
