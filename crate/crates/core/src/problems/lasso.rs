//! The Lasso, `min_x λ‖x‖₁ + (1/2m)‖Ax − b‖²`, as the saddle problem
//! `min_x max_y λ‖x‖₁ + ⟨y, Ax − b⟩ − (m/2)‖y‖²`.
//!
//! With `φ_X = ½‖·‖²` and `φ_Y = (m/2)‖·‖²`, `h*` is 1-strongly convex
//! relative to `φ_Y` and the dual-accelerated regime applies. The induced
//! operator norm is `sup ‖Ax‖_{Y*}/‖x‖₂` with the dual norm
//! `‖z‖_{Y*} = ‖z‖₂/√m`; the step sizes use the max row norm `‖A‖_{2,∞}`.

use ndarray::{Array1, Array2, ArrayView1};

use crate::bregman::Geometry;
use crate::engine::{self, DiagFlags, IterateState, SaddleProblem, SolveReport, StepSchedule, StoppingRule};
use crate::error::{check_dim, Error, Result};
use crate::linop::{Dense, LinearOperator};
use crate::numeric::{norm1, shrink1};

#[derive(Debug, Clone)]
pub struct Lasso {
    pub a: Dense,
    pub b: Array1<f64>,
    pub lambda: f64,
    op_norm: f64,
}

impl Lasso {
    pub fn new(a: Array2<f64>, b: Array1<f64>, lambda: f64) -> Result<Self> {
        check_dim("response vector", a.nrows(), b.len())?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
        }
        if a.is_empty() {
            return Err(Error::Config("empty design matrix".into()));
        }
        let a = Dense::new(a);
        let op_norm = match a.norm_2_inf() {
            v if v > 0.0 => v,
            _ => 1.0,
        };
        Ok(Lasso { a, b, lambda, op_norm })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `τ₀ = 1/(2‖A‖²)`, `σ₀ = 2`, `θ₀ = 0`.
    pub fn default_schedule(&self) -> StepSchedule {
        let tau0 = 0.5 / (self.op_norm * self.op_norm);
        StepSchedule::acc_dual(1.0, tau0, self.op_norm, Some(0.0)).expect("positive parameters")
    }

    /// `x₀ = 0`, `y₀ = b`.
    pub fn initial_state(&self) -> IterateState {
        IterateState::new(Array1::zeros(self.n()), self.b.clone())
    }

    pub fn solve(&self, stop: &StoppingRule, diag: &DiagFlags) -> Result<SolveReport> {
        engine::run(self, self.default_schedule(), self.initial_state(), stop, diag)
    }

    pub fn objective(&self, x: ArrayView1<f64>) -> Result<f64> {
        let r = self.a.apply(x)? - &self.b;
        Ok(self.lambda * norm1(x) + r.dot(&r) / (2.0 * self.m() as f64))
    }

    /// `‖m y − (Ax − b)‖₂` plus the largest violation of the subgradient
    /// conditions `[Aᵀy]_j = −λ sign(x_j)` on the support and
    /// `|[Aᵀy]_j| ≤ λ` off it.
    pub fn optimality_residual(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<f64> {
        check_dim("dual vector", self.m(), y.len())?;
        let r = self.a.apply(x)? - &self.b;
        let m = self.m() as f64;
        let coupling = crate::numeric::dist2((&y * m).view(), r.view());
        let aty = self.a.adjoint_apply(y)?;
        let sub = ndarray::Zip::from(x).and(&aty).fold(0.0f64, |acc, &xj, &g| {
            let v = if xj != 0.0 { (g + self.lambda * xj.signum()).abs() } else { (g.abs() - self.lambda).max(0.0) };
            acc.max(v)
        });
        Ok(coupling + sub)
    }

    /// Indices the dual point certifies as zero: `|[Aᵀy]_j| < λ − tol`.
    pub fn certified_zeros(&self, y: ArrayView1<f64>, tol: f64) -> Result<Vec<usize>> {
        let aty = self.a.adjoint_apply(y)?;
        Ok(aty.iter().enumerate().filter(|(_, &g)| g.abs() < self.lambda - tol).map(|(j, _)| j).collect())
    }
}

/// One dual-accelerated iteration; advances the schedule.
pub fn lasso_step(problem: &Lasso, state: &mut IterateState, schedule: &mut StepSchedule) -> Result<()> {
    engine::step_acc_dual(problem, state, schedule)
}

impl SaddleProblem for Lasso {
    fn operator(&self) -> &dyn LinearOperator {
        &self.a
    }
    fn op_norm(&self) -> f64 {
        self.op_norm
    }
    fn gamma_g(&self) -> f64 {
        0.0
    }
    fn gamma_h_star(&self) -> f64 {
        1.0
    }
    fn geom_x(&self) -> Geometry {
        Geometry::Quadratic { scale: 1.0 }
    }
    fn geom_y(&self) -> Geometry {
        Geometry::Quadratic { scale: self.m() as f64 }
    }

    /// `shrink₁(x̄ − τAᵀỹ, λτ)`.
    fn primal_prox(&self, y_tilde: ArrayView1<f64>, x_bar: ArrayView1<f64>, tau: f64) -> Result<Array1<f64>> {
        check_dim("primal point", self.n(), x_bar.len())?;
        let z = &x_bar - &(self.a.adjoint_apply(y_tilde)? * tau);
        Ok(shrink1(z.view(), self.lambda * tau))
    }

    /// `(ȳ + σ(Ax̃ − b)/m)/(1 + σ)`.
    fn dual_prox(&self, x_tilde: ArrayView1<f64>, y_bar: ArrayView1<f64>, sigma: f64) -> Result<Array1<f64>> {
        check_dim("dual point", self.m(), y_bar.len())?;
        let r = self.a.apply(x_tilde)? - &self.b;
        Ok((&y_bar + &(r * (sigma / self.m() as f64))) / (1.0 + sigma))
    }

    fn problem_id(&self) -> String {
        format!("lasso-m{}-n{}", self.m(), self.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn scalar_instance_is_optimal_at_origin() {
        let p = Lasso::new(array![[1.0]], array![1.0], 1.0).unwrap();
        assert_eq!(p.optimality_residual(array![0.0].view(), array![-1.0].view()).unwrap(), 0.0);
        assert!(p.optimality_residual(array![0.5].view(), array![0.3].view()).unwrap() > 0.0);
        assert!(Lasso::new(array![[1.0]], array![1.0], 0.0).is_err());
    }

    #[test]
    fn zero_data_residual() {
        let p = Lasso::new(array![[1.0, 2.0], [0.0, 1.0]], array![0.0, 0.0], 0.3).unwrap();
        let r = p.optimality_residual(array![0.0, 0.0].view(), array![0.0, 0.0].view()).unwrap();
        assert_eq!(r, 0.0);
    }
}
