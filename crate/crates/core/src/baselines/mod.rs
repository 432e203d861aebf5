//! Comparison methods: Euclidean (linear) PDHG, projected and proximal
//! gradient with momentum, and multiplicative-weights game dynamics.

mod gradient;
mod linear_pdhg;
mod mwu;

pub use gradient::{fb_logreg_step_size, fista_lasso, fista_lasso_step_size, FbLogreg, FistaLasso};
pub use linear_pdhg::{LinearPdhgGame, LinearPdhgLogreg};
pub use mwu::{eta_omwu, eta_pu, GameDynamics, Omwu, Pu};

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};

pub const DEFAULT_INNER_TOL: f64 = 1e-10;
pub const DEFAULT_INNER_MAX_ITERS: usize = 10_000;

/// Tolerance and iteration cap of the nested solves inside linear PDHG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig { tol: DEFAULT_INNER_TOL, max_iters: DEFAULT_INNER_MAX_ITERS }
    }
}

/// Euclidean projection onto `{u : ‖u‖₁ ≤ radius}`.
///
/// Exact: sorts the magnitudes and finds the soft-threshold level in one
/// pass, `O(d log d)`.
pub fn project_l1_ball(v: ArrayView1<f64>, radius: f64) -> Array1<f64> {
    assert!(radius > 0.0, "radius must be positive");
    let l1 = crate::numeric::norm1(v);
    if l1 <= radius {
        return v.to_owned();
    }
    let mut mags: Vec<f64> = v.iter().map(|t| t.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut thresh = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        cum += u;
        let t = (cum - radius) / (j + 1) as f64;
        if u > t {
            thresh = t;
        } else {
            break;
        }
    }
    v.mapv(|t| t.signum() * (t.abs() - thresh).max(0.0))
}

/// Minimizes a 1-strongly convex function with `L`-Lipschitz gradient by
/// the constant-momentum accelerated gradient method, stopping when the
/// largest coordinate change falls below `cfg.tol`.
pub(crate) fn accelerated_descent(
    mut grad: impl FnMut(ArrayView1<f64>, &mut Array1<f64>),
    lipschitz: f64,
    z0: Array1<f64>,
    cfg: InnerConfig,
) -> Result<Array1<f64>> {
    let kappa = lipschitz.max(1.0);
    let beta = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
    let step = 1.0 / lipschitz;
    let mut z = z0;
    let mut z_prev = z.clone();
    let mut g = Array1::zeros(z.len());
    let mut change = f64::INFINITY;
    for _ in 0..cfg.max_iters {
        let w = &z + &((&z - &z_prev) * beta);
        grad(w.view(), &mut g);
        let z_new = &w - &(&g * step);
        change = crate::numeric::dist_inf(z_new.view(), z.view());
        z_prev = std::mem::replace(&mut z, z_new);
        if change <= cfg.tol {
            return Ok(z);
        }
        if !change.is_finite() {
            break;
        }
    }
    Err(Error::NotConverged { what: "inner proximal solve", iterations: cfg.max_iters, last_estimate: change })
}
