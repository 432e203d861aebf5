mod common;

use ndarray::{Array1, Array2};
use nlpdhg::linop::{power_iteration, read_matrix_csv, transpose_dot, write_matrix_csv};
use nlpdhg::numeric::{norm1, norm2};
use nlpdhg::{Dense, LinearOperator, ScaledConcat};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-3.0..3.0f64, rows * cols).prop_map(move |v| Array2::from_shape_vec((rows, cols), v).unwrap())
}

fn sized() -> impl Strategy<Value = (Array2<f64>, Array1<f64>, Array1<f64>)> {
    (1usize..6, 1usize..6).prop_flat_map(|(m, n)| {
        (
            matrix(m, n),
            prop::collection::vec(-2.0..2.0f64, n).prop_map(Array1::from),
            prop::collection::vec(-2.0..2.0f64, m).prop_map(Array1::from),
        )
    })
}

proptest! {
    #[test]
    fn adjoint_identity((a, x, y) in sized()) {
        let op = Dense::new(a);
        let lhs = y.dot(&op.apply(x.view()).unwrap());
        let rhs = x.dot(&op.adjoint_apply(y.view()).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn scaled_concat_matches_materialized((b, v, y) in sized(), scale in 0.1..100.0f64) {
        let op = ScaledConcat::new(b, scale).unwrap();
        let dense = Dense::new(op.materialize());
        // x = (v₊, v₋) with both halves nonnegative
        let x = ndarray::concatenate![ndarray::Axis(0), v.mapv(|t| t.max(0.0)), v.mapv(|t| (-t).max(0.0))];
        let diff = &op.apply(x.view()).unwrap() - &dense.apply(x.view()).unwrap();
        prop_assert!(diff.iter().all(|d| d.abs() < 1e-10 * scale));
        let diff = &op.adjoint_apply(y.view()).unwrap() - &dense.adjoint_apply(y.view()).unwrap();
        prop_assert!(diff.iter().all(|d| d.abs() < 1e-10 * scale));
        for (a, b) in [
            (op.norm_1_2(), dense.norm_1_2()),
            (op.norm_1_inf(), dense.norm_1_inf()),
            (op.norm_2_inf(), dense.norm_2_inf()),
        ] {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + b));
        }
    }

    /// `‖Ax‖₂ ≤ ‖A‖_{1,2}‖x‖₁`, `‖Ax‖_∞ ≤ ‖A‖_{1,∞}‖x‖₁`, `‖Ax‖₂ ≤ ‖A‖_{2,2}‖x‖₂`,
    /// and `‖Ax‖_∞ ≤ ‖A‖_{2,∞}‖x‖₂`.
    #[test]
    fn norms_bound_the_operator((a, x, _y) in sized()) {
        let op = Dense::new(a.clone());
        let ax = op.apply(x.view()).unwrap();
        let tol = 1e-9;
        prop_assert!(norm2(ax.view()) <= op.norm_1_2() * norm1(x.view()) + tol);
        let inf = ax.fold(0.0f64, |s, v| s.max(v.abs()));
        prop_assert!(inf <= op.norm_1_inf() * norm1(x.view()) + tol);
        prop_assert!(inf <= op.norm_2_inf() * norm2(x.view()) + tol);
        let s = common::spectral_norm(&a);
        prop_assert!(norm2(ax.view()) <= s * norm2(x.view()) * (1.0 + 1e-9) + tol);
    }

    #[test]
    fn row_wise_transpose_product((a, _x, y) in sized()) {
        let got = transpose_dot(&a, y.view());
        let want = a.t().dot(&y);
        prop_assert!((&got - &want).iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn csv_round_trip((a, _x, _y) in sized()) {
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &a).unwrap();
        prop_assert_eq!(read_matrix_csv(buf.as_slice()).unwrap(), a);
    }
}

#[test]
fn power_iteration_matches_svd() {
    let mut rng = common::rng(1);
    for (m, n) in [(3, 3), (5, 2), (2, 7), (40, 60)] {
        let a = common::uniform_mat(&mut rng, m, n, -1.0, 1.0);
        let got = power_iteration(&Dense::new(a.clone()), 1e-12, 1_000_000).unwrap();
        let want = common::spectral_norm(&a);
        assert!((got - want).abs() < 1e-6 * want, "{m}x{n}: {got} vs {want}");
    }
}

#[test]
fn power_iteration_edge_cases() {
    assert_eq!(power_iteration(&Dense::new(Array2::zeros((3, 2))), 1e-10, 100).unwrap(), 0.0);
    // AᵀA·1 = 0 forces the fallback start
    let a = ndarray::array![[1.0, -1.0], [1.0, -1.0]];
    let s = power_iteration(&Dense::new(a), 1e-12, 1000).unwrap();
    assert!((s - 2.0).abs() < 1e-9);
    let slow = common::uniform_mat(&mut common::rng(5), 30, 30, -1.0, 1.0);
    assert!(matches!(power_iteration(&Dense::new(slow), 1e-16, 2), Err(nlpdhg::Error::NotConverged { .. })));
}

#[test]
fn norm_menu_examples() {
    let a = ndarray::array![[3.0, 0.0], [4.0, -1.0]];
    let op = Dense::new(a);
    assert_eq!(op.norm_1_2(), 5.0);
    assert_eq!(op.norm_1_inf(), 4.0);
    assert!((op.norm_2_inf() - 17f64.sqrt()).abs() < 1e-15);
    let sc = ScaledConcat::new(ndarray::array![[1.0, 2.0]], 3.0).unwrap();
    assert_eq!(sc.materialize(), ndarray::array![[3.0, 6.0, -3.0, -6.0]]);
    assert!(ScaledConcat::new(ndarray::array![[1.0]], -1.0).is_err());
}

#[test]
fn dimension_mismatch_is_reported() {
    let op = Dense::new(Array2::zeros((2, 3)));
    assert!(matches!(
        op.apply(Array1::zeros(2).view()),
        Err(nlpdhg::Error::DimensionMismatch { expected: 3, got: 2, .. })
    ));
    assert!(op.adjoint_apply(Array1::zeros(3).view()).is_err());
}
