//! Comparison methods: exactness of the ℓ1-ball projection and agreement of
//! every game and regression baseline with the nonlinear solver.

mod common;

use common::{bisect, rng, uniform_mat, uniform_vec};
use ndarray::{Array1, Array2};
use nlpdhg::baselines::{
    eta_omwu, eta_pu, fista_lasso, fista_lasso_step_size, project_l1_ball, FistaLasso, GameDynamics, InnerConfig,
    LinearPdhgGame,
};
use nlpdhg::engine::{drive, ChangeTest, DiagFlags, Watch};
use nlpdhg::numeric::{dist1, norm1};
use nlpdhg::problems::{Lasso, MatrixGame};
use nlpdhg::StoppingRule;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Outside the ball the projection lands on the sphere, and
    /// `v − p` is `t·sign(p)` on the support and at most `t` in magnitude
    /// off it, for a single threshold `t ≥ 0`.
    #[test]
    fn l1_projection_kkt(v in prop::collection::vec(-10.0..10.0f64, 1..40), radius in 0.01..20.0f64) {
        let v = Array1::from(v);
        let p = project_l1_ball(v.view(), radius);
        if norm1(v.view()) <= radius {
            prop_assert_eq!(&p, &v);
            return Ok(());
        }
        prop_assert!((norm1(p.view()) - radius).abs() < 1e-10 * radius.max(1.0));
        // the threshold solves Σ max(|v_j| − t, 0) = r
        let t = bisect(|t| radius - v.iter().map(|x| (x.abs() - t).max(0.0)).sum::<f64>(), 0.0, 10.0);
        for (&vj, &pj) in v.iter().zip(&p) {
            if pj != 0.0 {
                prop_assert!(pj.signum() == vj.signum());
                prop_assert!((vj - pj - t * pj.signum()).abs() < 1e-9);
            } else {
                prop_assert!(vj.abs() <= t + 1e-9);
            }
        }
        // a projection is idempotent and never further than any ball point
        let again = project_l1_ball(p.view(), radius);
        prop_assert!(dist1(again.view(), p.view()) < 1e-9 * radius.max(1.0));
        let q = &p * 0.5;
        prop_assert!(v.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            <= v.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>() + 1e-12);
    }
}

#[test]
fn l1_projection_vertex_and_ties() {
    let p = project_l1_ball(ndarray::arr1(&[5.0, 1.0, -0.5]).view(), 2.0);
    assert_eq!(p, ndarray::arr1(&[2.0, 0.0, 0.0]));
    let p = project_l1_ball(ndarray::arr1(&[1.0, -1.0, 1.0, -1.0]).view(), 2.0);
    assert_eq!(p, ndarray::arr1(&[0.5, -0.5, 0.5, -0.5]));
}

fn game(seed: u64, m: usize, n: usize, lambda: f64) -> MatrixGame {
    MatrixGame::new(uniform_mat(&mut rng(seed), m, n, -1.0, 1.0), lambda).unwrap()
}

#[test]
fn game_baselines_share_the_equilibrium() {
    for (seed, (m, n), lambda) in [(1, (8, 6), 0.2), (2, (5, 12), 0.05), (3, (10, 10), 1.0)] {
        let g = game(seed, m, n, lambda);
        let reference = g.solve(g.uniform_state(), &StoppingRule::max_iters(20_000), &DiagFlags::default()).unwrap();
        let (r1, r2) = g.optimality_residual(reference.x.view(), reference.y.view()).unwrap();
        assert!(r1.max(r2) < 1e-12, "seed {seed}: {r1} {r2}");

        let start = g.random_state(seed);
        let norm = g.a.matrix.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let stop = StoppingRule::max_iters(200_000).with_change(ChangeTest::absolute(Watch::Dual, 1e-15));
        for (name, mut it) in [
            ("pu", GameDynamics::pu(&g, eta_pu(norm), start.x.clone(), start.y.clone()).unwrap()),
            ("omwu", GameDynamics::omwu(&g, eta_omwu(norm), start.x.clone(), start.y.clone()).unwrap()),
        ] {
            let rep = drive(&mut it, &stop, &DiagFlags::default()).unwrap();
            let err = dist1(rep.x.view(), reference.x.view()) + dist1(rep.y.view(), reference.y.view());
            assert!(err < 1e-9, "seed {seed} {name}: ℓ1 error {err} after {} steps", rep.k);
        }

        let a_norm = common::spectral_norm(&g.a.matrix);
        let mut lin =
            LinearPdhgGame::new(&g, a_norm, start.x.clone(), start.y.clone(), InnerConfig::default()).unwrap();
        let rep = drive(&mut lin, &StoppingRule::max_iters(3000), &DiagFlags::default()).unwrap();
        let err = dist1(rep.x.view(), reference.x.view()) + dist1(rep.y.view(), reference.y.view());
        // the nested entropy prox is only solved to the inner tolerance
        assert!(err < 1e-6, "seed {seed} linear pdhg: ℓ1 error {err}");
        let (theta, tau, sigma) = lin.params();
        assert!((tau * sigma * theta * a_norm * a_norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn game_dynamics_reject_unstable_rates() {
    let g = game(4, 3, 3, 0.5);
    let (x, y) = (Array1::from_elem(3, 1.0 / 3.0), Array1::from_elem(3, 1.0 / 3.0));
    assert!(GameDynamics::pu(&g, 2.0, x.clone(), y.clone()).is_err());
    assert!(GameDynamics::omwu(&g, 0.0, x.clone(), y.clone()).is_err());
    assert!(GameDynamics::pu(&g, 0.5, Array1::from_elem(2, 0.5), y).is_err());
}

/// With `A = √m I` the Lasso decouples into scalar soft-thresholding
/// problems `λ|x| + ½(x − b/√m)²`.
#[test]
fn fista_on_an_orthogonal_design() {
    let m = 12;
    let a = Array2::eye(m) * (m as f64).sqrt();
    let b = uniform_vec(&mut rng(6), m, -2.0, 2.0);
    let lambda = 0.3;
    let p = Lasso::new(a, b.clone(), lambda).unwrap();
    let tau = fista_lasso_step_size(&p, (m as f64).sqrt());
    let rep = fista_lasso(&p, tau, &FistaLasso::stopping_rule(1e-14, 10_000)).unwrap();
    for (j, &xj) in rep.x.iter().enumerate() {
        let z = b[j] / (m as f64).sqrt();
        let expect = z.signum() * (z.abs() - lambda).max(0.0);
        assert!((xj - expect).abs() < 1e-12, "x[{j}] = {xj}, expected {expect}");
        if expect == 0.0 {
            assert_eq!(xj, 0.0);
        }
    }
}
