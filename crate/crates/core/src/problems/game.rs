//! Entropy-regularized zero-sum matrix games,
//! `min_{x ∈ Δ_n} max_{y ∈ Δ_m} λH(x) + ⟨y, Ax⟩ − λH(y)`.
//!
//! KL geometry on both simplices makes both sides λ-strongly convex, so the
//! linear-rate regime applies with `‖A‖_{1,∞} = max |a_ij|`. Both proximal
//! maps are tempered multiplicative-weights updates.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;

use crate::bregman::Geometry;
use crate::engine::{self, DiagFlags, IterateState, Order, SaddleProblem, SolveReport, StepSchedule, StoppingRule};
use crate::error::{check_dim, Error, Result};
use crate::harness::rng::stream_rng;
use crate::linop::{Dense, LinearOperator};
use crate::numeric::{dist1, softmax};
use crate::problems::logreg::entropic_step;

/// Sign of the extrapolation in the dual step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extrapolation {
    /// `x_k + θ(x_k − x_{k−1})`, the form the contraction guarantee covers.
    #[default]
    Forward,
    /// `x_k − θ(x_k − x_{k−1})`.
    Reflected,
}

#[derive(Debug, Clone)]
pub struct MatrixGame {
    pub a: Dense,
    pub lambda: f64,
    pub extrapolation: Extrapolation,
    op_norm: f64,
}

impl MatrixGame {
    pub fn new(a: Array2<f64>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
        }
        if a.is_empty() {
            return Err(Error::Config("empty payoff matrix".into()));
        }
        let a = Dense::new(a);
        // any positive number bounds the zero operator
        let op_norm = match a.norm_1_inf() {
            v if v > 0.0 => v,
            _ => 1.0,
        };
        Ok(MatrixGame { a, lambda, extrapolation: Extrapolation::Forward, op_norm })
    }

    pub fn with_extrapolation(mut self, e: Extrapolation) -> Self {
        self.extrapolation = e;
        self
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Linear-rate parameters with `γ_g = γ_{h*} = λ` (so `τ = σ`), dual
    /// step first.
    pub fn default_schedule(&self) -> StepSchedule {
        let mut s = StepSchedule::linear_rate(self.lambda, self.lambda, self.op_norm, Order::YFirst)
            .expect("positive parameters");
        if self.extrapolation == Extrapolation::Reflected {
            s.extrapolation_sign = -1.0;
        }
        s
    }

    pub fn uniform_state(&self) -> IterateState {
        IterateState::new(
            Array1::from_elem(self.n(), 1.0 / self.n() as f64),
            Array1::from_elem(self.m(), 1.0 / self.m() as f64),
        )
    }

    /// Strictly positive random points, normalized onto the simplices.
    pub fn random_state(&self, seed: u64) -> IterateState {
        let draw = |len: usize, stream: u64| {
            let mut rng = stream_rng(seed, stream);
            let v: Array1<f64> = (0..len).map(|_| rng.random_range(f64::EPSILON..1.0)).collect();
            let s = v.sum();
            v / s
        };
        let x = draw(self.n(), 16);
        let y = draw(self.m(), 17);
        IterateState::new(x, y)
    }

    pub fn solve(&self, init: IterateState, stop: &StoppingRule, diag: &DiagFlags) -> Result<SolveReport> {
        engine::run(self, self.default_schedule(), init, stop, diag)
    }

    /// `(r₁, r₂)`: spread of `Aᵀy + λ(1 + ln x)` around its mean (the
    /// simplex multiplier), and `‖y − softmax(Ax/λ)‖₁`.
    pub fn optimality_residual(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<(f64, f64)> {
        Geometry::NegEntropy.check_domain(x, true)?;
        Geometry::NegEntropy.check_domain(y, true)?;
        let aty = self.a.adjoint_apply(y)?;
        let stat = ndarray::Zip::from(&aty).and(x).map_collect(|&g, &xj| g + self.lambda * (1.0 + xj.ln()));
        let c = stat.mean().unwrap_or(0.0);
        let r1 = stat.fold(0.0, |a: f64, &v| a.max((v - c).abs()));
        let ax = self.a.apply(x)? / self.lambda;
        let r2 = dist1(y, softmax(ax.view()).view());
        Ok((r1, r2))
    }
}

/// One dual-first linear-rate iteration with explicit parameters.
pub fn matrix_game_step(
    problem: &MatrixGame,
    state: &mut IterateState,
    theta: f64,
    tau: f64,
    sigma: f64,
) -> Result<()> {
    let mut s = problem.default_schedule();
    s.theta = theta;
    s.tau = tau;
    s.sigma = sigma;
    engine::step(problem, state, &s)
}

impl SaddleProblem for MatrixGame {
    fn operator(&self) -> &dyn LinearOperator {
        &self.a
    }
    fn op_norm(&self) -> f64 {
        self.op_norm
    }
    fn gamma_g(&self) -> f64 {
        self.lambda
    }
    fn gamma_h_star(&self) -> f64 {
        self.lambda
    }
    fn geom_x(&self) -> Geometry {
        Geometry::NegEntropy
    }
    fn geom_y(&self) -> Geometry {
        Geometry::NegEntropy
    }

    /// `x ∝ (x̄ e^{−τAᵀỹ})^{1/(1+λτ)}`.
    fn primal_prox(&self, y_tilde: ArrayView1<f64>, x_bar: ArrayView1<f64>, tau: f64) -> Result<Array1<f64>> {
        check_dim("primal point", self.n(), x_bar.len())?;
        let g = self.a.adjoint_apply(y_tilde)?;
        Ok(entropic_step(x_bar, &g, tau, 1.0 / (1.0 + self.lambda * tau)))
    }

    /// `y ∝ (ȳ e^{σAx̃})^{1/(1+λσ)}`.
    fn dual_prox(&self, x_tilde: ArrayView1<f64>, y_bar: ArrayView1<f64>, sigma: f64) -> Result<Array1<f64>> {
        check_dim("dual point", self.m(), y_bar.len())?;
        let g = -self.a.apply(x_tilde)?;
        Ok(entropic_step(y_bar, &g, sigma, 1.0 / (1.0 + self.lambda * sigma)))
    }

    fn problem_id(&self) -> String {
        format!("game-m{}-n{}", self.m(), self.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn one_point_simplex() {
        let g = MatrixGame::new(array![[3.5]], 0.1).unwrap();
        let mut st = g.uniform_state();
        let s = g.default_schedule();
        matrix_game_step(&g, &mut st, s.theta, s.tau, s.sigma).unwrap();
        assert_eq!(st.x[0], 1.0);
        assert_eq!(st.y[0], 1.0);
    }

    #[test]
    fn zero_payoff_tempers_weights() {
        let g = MatrixGame::new(Array2::zeros((2, 3)), 0.5).unwrap();
        let mut st = IterateState::new(array![0.2, 0.3, 0.5], array![0.9, 0.1]);
        let x0 = st.x.clone();
        matrix_game_step(&g, &mut st, 0.4, 2.0, 2.0).unwrap();
        let p = 1.0 / (1.0 + 0.5 * 2.0);
        let expect = x0.mapv(|v: f64| v.powf(p));
        let expect = &expect / expect.sum();
        assert!(dist1(st.x.view(), expect.view()) < 1e-15);
    }

    #[test]
    fn residuals_at_uniform() {
        let g = MatrixGame::new(Array2::zeros((3, 3)), 0.1).unwrap();
        let u = Array1::from_elem(3, 1.0 / 3.0);
        let (r1, r2) = g.optimality_residual(u.view(), u.view()).unwrap();
        assert!(r1 < 1e-15 && r2 < 1e-15);
        let sym = MatrixGame::new(array![[0.0, 1.0], [1.0, 0.0]], 0.1).unwrap();
        let h = array![0.5, 0.5];
        let (r1, r2) = sym.optimality_residual(h.view(), h.view()).unwrap();
        assert!(r1 < 1e-12 && r2 < 1e-12);
        let (r1, r2) = sym.optimality_residual(array![0.6, 0.4].view(), h.view()).unwrap();
        assert!(r1 > 0.0 && r2 > 0.0);
    }
}
