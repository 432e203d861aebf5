//! Proximal/projected gradient with Nesterov momentum (FISTA).
//!
//! The momentum sequence starts at `t₀ = β₀ = 0`; the first coefficient
//! `(t₀ − 1)/t₁ = −1` would step backwards, so β is clamped to `[0, 1]`.

use ndarray::{Array1, ArrayView1};

use super::project_l1_ball;
use crate::engine::{drive, ChangeTest, DiagFlags, Iterative, SolveReport, StoppingRule, Watch};
use crate::error::{Error, Result};
use crate::linop::{transpose_dot, LinearOperator};
use crate::numeric::{all_finite, shrink1, sigmoid};
use crate::problems::{L1LogReg, Lasso};

#[derive(Debug, Clone, Copy)]
struct Momentum {
    t: f64,
    beta: f64,
}

impl Momentum {
    fn new() -> Self {
        Momentum { t: 0.0, beta: 0.0 }
    }

    fn advance(&mut self) {
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * self.t * self.t).sqrt());
        self.beta = ((self.t - 1.0) / t_next).clamp(0.0, 1.0);
        self.t = t_next;
    }
}

fn ensure_finite(v: &Array1<f64>, iteration: usize) -> Result<()> {
    if all_finite(v.view()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what: "primal iterate", iteration })
    }
}

/// `τ = 4m/‖B‖²_{2,2}`, the inverse Lipschitz constant of the loss gradient.
pub fn fb_logreg_step_size(problem: &L1LogReg, b_norm: f64) -> f64 {
    4.0 * problem.m() as f64 / (b_norm * b_norm)
}

/// Projected gradient with momentum on the ℓ1 ball, from `v₀ = 1/d`.
///
/// The dual slot carries `σ(Bw_k)/m`, the loss gradient weights at the
/// extrapolated point.
pub struct FbLogreg<'a> {
    problem: &'a L1LogReg,
    tau: f64,
    k: usize,
    v: Array1<f64>,
    v_prev: Array1<f64>,
    y: Array1<f64>,
    y_prev: Array1<f64>,
    mom: Momentum,
}

impl<'a> FbLogreg<'a> {
    pub fn new(problem: &'a L1LogReg, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {tau}")));
        }
        let v = Array1::from_elem(problem.d(), 1.0 / problem.d() as f64);
        let y = Array1::from_elem(problem.m(), 0.5 / problem.m() as f64);
        Ok(FbLogreg { problem, tau, k: 0, v_prev: v.clone(), v, y_prev: y.clone(), y, mom: Momentum::new() })
    }

    /// Stopping rule of the experiments: `‖v_{k+1} − v_k‖₁ ≤ tol ‖v_{k+1}‖₁`.
    pub fn stopping_rule(tol: f64, max_iters: usize) -> StoppingRule {
        StoppingRule::max_iters(max_iters)
            .with_change(ChangeTest::relative(Watch::Primal, tol).in_norm(crate::bregman::Norm::L1))
    }
}

impl Iterative for FbLogreg<'_> {
    fn step(&mut self) -> Result<()> {
        let b = self.problem.b();
        let m = self.problem.m() as f64;
        let w = &self.v + &((&self.v - &self.v_prev) * self.mom.beta);
        let y = b.dot(&w).mapv(|t| sigmoid(t) / m);
        let v_new = project_l1_ball((&w - &(transpose_dot(b, y.view()) * self.tau)).view(), self.problem.lambda());
        ensure_finite(&v_new, self.k + 1)?;
        self.v_prev = std::mem::replace(&mut self.v, v_new);
        self.y_prev = std::mem::replace(&mut self.y, y);
        self.mom.advance();
        self.k += 1;
        Ok(())
    }
    fn k(&self) -> usize {
        self.k
    }
    fn x(&self) -> ArrayView1<'_, f64> {
        self.v.view()
    }
    fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }
    fn x_prev(&self) -> ArrayView1<'_, f64> {
        self.v_prev.view()
    }
    fn y_prev(&self) -> ArrayView1<'_, f64> {
        self.y_prev.view()
    }
    fn regime(&self) -> String {
        "fb-splitting".into()
    }
    fn problem_id(&self) -> String {
        format!("logreg-m{}-d{}", self.problem.m(), self.problem.d())
    }
}

/// `τ = m/‖A‖²_{2,2}`.
pub fn fista_lasso_step_size(problem: &Lasso, a_norm: f64) -> f64 {
    problem.m() as f64 / (a_norm * a_norm)
}

/// FISTA for the Lasso from `x₀ = 0`. The dual slot carries the residual
/// `(Aw_k − b)/m` at the extrapolated point.
pub struct FistaLasso<'a> {
    problem: &'a Lasso,
    tau: f64,
    k: usize,
    x: Array1<f64>,
    x_prev: Array1<f64>,
    y: Array1<f64>,
    y_prev: Array1<f64>,
    mom: Momentum,
}

impl<'a> FistaLasso<'a> {
    pub fn new(problem: &'a Lasso, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {tau}")));
        }
        let x = Array1::zeros(problem.n());
        let y = -&problem.b / problem.m() as f64;
        Ok(FistaLasso { problem, tau, k: 0, x_prev: x.clone(), x, y_prev: y.clone(), y, mom: Momentum::new() })
    }

    /// `‖x_{k+1} − x_k‖² ≤ tol`.
    pub fn stopping_rule(tol: f64, max_iters: usize) -> StoppingRule {
        StoppingRule::max_iters(max_iters).with_change(ChangeTest::absolute(Watch::Primal, tol.sqrt()))
    }
}

impl Iterative for FistaLasso<'_> {
    fn step(&mut self) -> Result<()> {
        let a = &self.problem.a;
        let m = self.problem.m() as f64;
        let w = &self.x + &((&self.x - &self.x_prev) * self.mom.beta);
        let r = (a.apply_unchecked(w.view()) - &self.problem.b) / m;
        let z = &w - &(a.adjoint_unchecked(r.view()) * self.tau);
        let x_new = shrink1(z.view(), self.problem.lambda * self.tau);
        ensure_finite(&x_new, self.k + 1)?;
        self.x_prev = std::mem::replace(&mut self.x, x_new);
        self.y_prev = std::mem::replace(&mut self.y, r);
        self.mom.advance();
        self.k += 1;
        Ok(())
    }
    fn k(&self) -> usize {
        self.k
    }
    fn x(&self) -> ArrayView1<'_, f64> {
        self.x.view()
    }
    fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }
    fn x_prev(&self) -> ArrayView1<'_, f64> {
        self.x_prev.view()
    }
    fn y_prev(&self) -> ArrayView1<'_, f64> {
        self.y_prev.view()
    }
    fn regime(&self) -> String {
        "fista".into()
    }
    fn problem_id(&self) -> String {
        format!("lasso-m{}-n{}", self.problem.m(), self.problem.n())
    }
}

/// Runs FISTA with step `tau` until `stop` fires.
pub fn fista_lasso(problem: &Lasso, tau: f64, stop: &StoppingRule) -> Result<SolveReport> {
    let mut it = FistaLasso::new(problem, tau)?;
    drive(&mut it, stop, &DiagFlags::default())
}
