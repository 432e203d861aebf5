//! Accelerated PDHG with Euclidean proximal terms. Both problems need a
//! nested solve per step: the proximal maps are evaluated through Moreau's
//! identity and an inner accelerated gradient method.

use ndarray::{Array1, ArrayView1};

use super::{accelerated_descent, project_l1_ball, InnerConfig};
use crate::engine::{linear_rate_params, ErgodicAverage, Iterative};
use crate::error::{Error, Result};
use crate::linop::transpose_dot;
use crate::numeric::{all_finite, sigmoid, softmax, softmax_in_place};
use crate::problems::{L1LogReg, MatrixGame};

fn ensure_finite(v: &Array1<f64>, what: &'static str, iteration: usize) -> Result<()> {
    if all_finite(v.view()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, iteration })
    }
}

/// Linear PDHG for ℓ1-constrained logistic regression in the original
/// variable `v ∈ ℝ^d`, dual step first, `γ_{h*} = 4m`.
pub struct LinearPdhgLogreg<'a> {
    problem: &'a L1LogReg,
    inner: InnerConfig,
    k: usize,
    v: Array1<f64>,
    v_prev: Array1<f64>,
    w: Array1<f64>,
    w_prev: Array1<f64>,
    theta: f64,
    tau: f64,
    sigma: f64,
    tau0: f64,
    ergodic: ErgodicAverage,
}

impl<'a> LinearPdhgLogreg<'a> {
    /// `b_norm` is `‖B‖_{2,2}`. Starts from `v = 1/d`, `w = 1/(2m)` with
    /// `τ₀ = 2m/‖B‖²`, `σ₀ = 1/(‖B‖²τ₀)` and `θ₀ = 0`.
    pub fn new(problem: &'a L1LogReg, b_norm: f64, inner: InnerConfig) -> Result<Self> {
        if !(b_norm > 0.0 && b_norm.is_finite()) {
            return Err(Error::Config(format!("spectral norm must be positive, got {b_norm}")));
        }
        let (m, d) = (problem.m(), problem.d());
        let tau0 = 2.0 * m as f64 / (b_norm * b_norm);
        let v = Array1::from_elem(d, 1.0 / d as f64);
        let w = Array1::from_elem(m, 0.5 / m as f64);
        Ok(LinearPdhgLogreg {
            problem,
            inner,
            k: 0,
            v_prev: v.clone(),
            v,
            w_prev: w.clone(),
            w,
            theta: 0.0,
            tau: tau0,
            sigma: 1.0 / (b_norm * b_norm * tau0),
            tau0,
            ergodic: ErgodicAverage::new(d, m),
        })
    }

    pub fn v(&self) -> ArrayView1<'_, f64> {
        self.v.view()
    }

    pub fn tau_sigma(&self) -> (f64, f64) {
        (self.tau, self.sigma)
    }
}

impl Iterative for LinearPdhgLogreg<'_> {
    fn step(&mut self) -> Result<()> {
        let b = self.problem.b();
        let m = self.problem.m() as f64;
        let sigma = self.sigma;
        let v_bar = &self.v + &((&self.v - &self.v_prev) * self.theta);
        let z = &self.w + &(b.dot(&v_bar) * sigma);
        // prox of σh* at z is z − argmin_u ½‖u − z‖² + (σ/m) Σ ln(1 + e^{u_i/σ})
        let u0 = &z - &self.w;
        let lipschitz = 1.0 + 1.0 / (4.0 * m * sigma);
        let u = accelerated_descent(
            |u, g| ndarray::Zip::from(g).and(u).and(&z).for_each(|g, &u, &z| *g = u - z + sigmoid(u / sigma) / m),
            lipschitz,
            u0,
            self.inner,
        )?;
        // at the inner minimizer z − u = σ(u/σ)/m, which stays in the open box
        let w_new = u.mapv(|t| sigmoid(t / sigma) / m);
        ensure_finite(&w_new, "dual iterate", self.k + 1)?;
        let grad = transpose_dot(b, w_new.view());
        let v_new = project_l1_ball((&self.v - &(grad * self.tau)).view(), self.problem.lambda());
        ensure_finite(&v_new, "primal iterate", self.k + 1)?;

        self.ergodic.add((self.tau / self.tau0).ln(), v_new.view(), w_new.view());
        self.v_prev = std::mem::replace(&mut self.v, v_new);
        self.w_prev = std::mem::replace(&mut self.w, w_new);
        let theta = 1.0 / (1.0 + 4.0 * m * self.sigma).sqrt();
        self.theta = theta;
        self.tau /= theta;
        self.sigma *= theta;
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
        self.w.view()
    }
    fn x_prev(&self) -> ArrayView1<'_, f64> {
        self.v_prev.view()
    }
    fn y_prev(&self) -> ArrayView1<'_, f64> {
        self.w_prev.view()
    }
    fn ergodic(&self) -> Option<&ErgodicAverage> {
        Some(&self.ergodic)
    }
    fn regime(&self) -> String {
        "linear-pdhg-acc-dual".into()
    }
    fn problem_id(&self) -> String {
        format!("logreg-m{}-d{}", self.problem.m(), self.problem.d())
    }
}

/// `argmin_{p ∈ Δ} cH(p) + ½‖p − v‖²`, via `p = softmax(z*/c)` where `z*`
/// minimizes the conjugate objective `½‖z − v‖² + c·LSE(z/c)`.
fn entropy_simplex_prox(v: &Array1<f64>, c: f64, warm: Array1<f64>, inner: InnerConfig) -> Result<Array1<f64>> {
    let mut buf = Array1::zeros(v.len());
    let z = accelerated_descent(
        |z, g| {
            buf.assign(&z);
            buf /= c;
            softmax_in_place(&mut buf);
            g.assign(&(&z - v + &buf));
        },
        1.0 + 1.0 / c,
        warm,
        inner,
    )?;
    Ok(softmax((&z / c).view()))
}

/// Linear-rate PDHG with Euclidean proximal terms for the regularized game,
/// dual step first, parameters from `‖A‖_{2,2}` and `γ = λ`.
pub struct LinearPdhgGame<'a> {
    problem: &'a MatrixGame,
    inner: InnerConfig,
    k: usize,
    x: Array1<f64>,
    x_prev: Array1<f64>,
    y: Array1<f64>,
    y_prev: Array1<f64>,
    theta: f64,
    tau: f64,
    sigma: f64,
    ergodic: ErgodicAverage,
}

impl<'a> LinearPdhgGame<'a> {
    /// `a_norm` is `‖A‖_{2,2}`.
    pub fn new(
        problem: &'a MatrixGame,
        a_norm: f64,
        x0: Array1<f64>,
        y0: Array1<f64>,
        inner: InnerConfig,
    ) -> Result<Self> {
        crate::error::check_dim("primal start", problem.n(), x0.len())?;
        crate::error::check_dim("dual start", problem.m(), y0.len())?;
        let (theta, tau, sigma) = linear_rate_params(problem.lambda, problem.lambda, a_norm)?;
        Ok(LinearPdhgGame {
            problem,
            inner,
            k: 0,
            x_prev: x0.clone(),
            x: x0,
            y_prev: y0.clone(),
            y: y0,
            theta,
            tau,
            sigma,
            ergodic: ErgodicAverage::new(problem.n(), problem.m()),
        })
    }

    pub fn params(&self) -> (f64, f64, f64) {
        (self.theta, self.tau, self.sigma)
    }
}

impl Iterative for LinearPdhgGame<'_> {
    fn step(&mut self) -> Result<()> {
        let a = &self.problem.a.matrix;
        let lambda = self.problem.lambda;
        let x_bar = &self.x + &((&self.x - &self.x_prev) * self.theta);
        let v = &self.y + &(a.dot(&x_bar) * self.sigma);
        let warm = &v - &self.y;
        let y_new = entropy_simplex_prox(&v, lambda * self.sigma, warm, self.inner)?;
        ensure_finite(&y_new, "dual iterate", self.k + 1)?;
        let w = &self.x - &(transpose_dot(a, y_new.view()) * self.tau);
        let warm = &w - &self.x;
        let x_new = entropy_simplex_prox(&w, lambda * self.tau, warm, self.inner)?;
        ensure_finite(&x_new, "primal iterate", self.k + 1)?;

        self.ergodic.add(-(self.k as f64) * self.theta.ln(), x_new.view(), y_new.view());
        self.x_prev = std::mem::replace(&mut self.x, x_new);
        self.y_prev = std::mem::replace(&mut self.y, y_new);
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
    fn ergodic(&self) -> Option<&ErgodicAverage> {
        Some(&self.ergodic)
    }
    fn regime(&self) -> String {
        "linear-pdhg-linear-rate".into()
    }
    fn problem_id(&self) -> String {
        format!("game-m{}-n{}", self.problem.m(), self.problem.n())
    }
}
