//! ℓ1-constrained logistic regression,
//! `min_{‖v‖₁ ≤ λ} (1/m) Σ ln(1 + e^{[Bv]_i})`.
//!
//! The ball is written as `v = λ(I | −I)x` with `x` in the simplex `Δ_{2d}`,
//! which turns the problem into `min_{x ∈ Δ} max_y ⟨y, Ax⟩ − ψ(y)` with
//! `A = λ(B | −B)` and `ψ` the conjugate of the averaged softplus. The
//! primal side uses the KL geometry, the dual side the averaged binary
//! entropy scaled by `1/(4m)`, so `γ_{h*} = 4m` and the dual-accelerated
//! regime applies.

use ndarray::{Array1, Array2, ArrayView1};

use crate::bregman::Geometry;
use crate::engine::{self, DiagFlags, IterateState, SaddleProblem, SolveReport, StepSchedule, StoppingRule};
use crate::error::{check_dim, Error, Result};
use crate::linop::{LinearOperator, ScaledConcat};
use crate::numeric::{logit, sigmoid, softmax_in_place, softplus};

#[derive(Debug, Clone)]
pub struct L1LogReg {
    op: ScaledConcat,
    op_norm: f64,
}

impl L1LogReg {
    /// `b` holds the rows `−b_i u_i`; `lambda` is the ℓ1 radius.
    pub fn new(b: Array2<f64>, lambda: f64) -> Result<Self> {
        if b.nrows() == 0 || b.ncols() == 0 {
            return Err(Error::Config("empty design matrix".into()));
        }
        let op = ScaledConcat::new(b, lambda)?;
        let op_norm = op.norm_1_2();
        if !(op_norm > 0.0) {
            return Err(Error::Config("design matrix is zero".into()));
        }
        Ok(L1LogReg { op, op_norm })
    }

    pub fn b(&self) -> &Array2<f64> {
        &self.op.base
    }

    pub fn lambda(&self) -> f64 {
        self.op.scale
    }

    pub fn m(&self) -> usize {
        self.op.base.nrows()
    }

    pub fn d(&self) -> usize {
        self.op.base.ncols()
    }

    /// The schedule used in the experiments: `θ₀ = 0`, `τ₀ = 2m/‖A‖²`,
    /// hence `σ₀ = 1/(2m)`.
    pub fn default_schedule(&self) -> StepSchedule {
        let m = self.m() as f64;
        let tau0 = 2.0 * m / (self.op_norm * self.op_norm);
        StepSchedule::acc_dual(4.0 * m, tau0, self.op_norm, Some(0.0)).expect("positive parameters")
    }

    /// `x₀ = 1/n`, `y₀ = 1/(2m)` (lift `w₀ = 0`).
    pub fn initial_state(&self) -> IterateState {
        let n = 2 * self.d();
        let m = self.m();
        IterateState::new(Array1::from_elem(n, 1.0 / n as f64), Array1::from_elem(m, 0.5 / m as f64))
            .with_lift(Array1::zeros(m))
    }

    pub fn solve(&self, stop: &StoppingRule, diag: &DiagFlags) -> Result<SolveReport> {
        engine::run(self, self.default_schedule(), self.initial_state(), stop, diag)
    }

    /// `y = σ(Ax)/m`, the dual point matched to `x`.
    pub fn dual_map(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        let inv_m = 1.0 / self.m() as f64;
        Ok(self.op.apply(x)?.mapv(|t| sigmoid(t) * inv_m))
    }

    /// `(1/m) Σ ln(1 + e^{[Ax]_i})`.
    pub fn objective_x(&self, x: ArrayView1<f64>) -> Result<f64> {
        let ax = self.op.apply(x)?;
        Ok(ax.iter().map(|&t| softplus(t)).sum::<f64>() / self.m() as f64)
    }

    /// `(1/m) Σ ln(1 + e^{[Bv]_i})`.
    pub fn objective_v(&self, v: ArrayView1<f64>) -> Result<f64> {
        check_dim("coefficient vector", self.d(), v.len())?;
        let bv = self.op.base.dot(&v);
        Ok(bv.iter().map(|&t| softplus(t)).sum::<f64>() / self.m() as f64)
    }

    /// `‖y − σ(Ax)/m‖₂`; zero exactly at a saddle point.
    pub fn dual_residual(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<f64> {
        check_dim("dual vector", self.m(), y.len())?;
        let target = self.dual_map(x)?;
        Ok(crate::numeric::dist2(y, target.view()))
    }

    /// Indices `j` with `[−Aᵀy]_j ≥ max(−Aᵀy) − tol`; every optimal `x`
    /// vanishes outside this set.
    pub fn support_from_dual(&self, y: ArrayView1<f64>, tol: f64) -> Result<Vec<usize>> {
        let g = self.op.adjoint_apply(y)?.mapv(|t| -t);
        Ok(near_max_indices(g.view(), tol))
    }
}

/// Indices within `tol` of the maximum entry.
pub fn near_max_indices(g: ArrayView1<f64>, tol: f64) -> Vec<usize> {
    let mx = g.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    g.iter().enumerate().filter(|(_, &v)| v >= mx - tol).map(|(j, _)| j).collect()
}

/// `v = λ(I | −I)x`.
pub fn recover_v(x: ArrayView1<f64>, lambda: f64) -> Result<Array1<f64>> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::Config(format!("simplex lift needs an even dimension, got {}", x.len())));
    }
    let d = x.len() / 2;
    Ok((&x.slice(ndarray::s![..d]) - &x.slice(ndarray::s![d..])) * lambda)
}

/// One dual-accelerated iteration; advances the schedule.
pub fn l1logreg_step(problem: &L1LogReg, state: &mut IterateState, schedule: &mut StepSchedule) -> Result<()> {
    engine::step_acc_dual(problem, state, schedule)
}

/// `x ∝ x̄ e^{−τ g}` on the simplex, normalized in log space.
pub(crate) fn entropic_step(x_bar: ArrayView1<f64>, g: &Array1<f64>, tau: f64, power: f64) -> Array1<f64> {
    let mut z = ndarray::Zip::from(x_bar).and(g).map_collect(|&xb, &gj| power * (xb.ln() - tau * gj));
    softmax_in_place(&mut z);
    z
}

impl SaddleProblem for L1LogReg {
    fn operator(&self) -> &dyn LinearOperator {
        &self.op
    }
    fn op_norm(&self) -> f64 {
        self.op_norm
    }
    fn gamma_g(&self) -> f64 {
        0.0
    }
    fn gamma_h_star(&self) -> f64 {
        4.0 * self.m() as f64
    }
    fn geom_x(&self) -> Geometry {
        Geometry::NegEntropy
    }
    fn geom_y(&self) -> Geometry {
        Geometry::logistic_dual(self.m())
    }

    fn primal_prox(&self, y_tilde: ArrayView1<f64>, x_bar: ArrayView1<f64>, tau: f64) -> Result<Array1<f64>> {
        check_dim("primal point", self.op.cols(), x_bar.len())?;
        let g = self.op.adjoint_apply(y_tilde)?;
        Ok(entropic_step(x_bar, &g, tau, 1.0))
    }

    fn dual_prox(&self, x_tilde: ArrayView1<f64>, y_bar: ArrayView1<f64>, sigma: f64) -> Result<Array1<f64>> {
        let mut lift = None;
        self.dual_prox_lifted(x_tilde, y_bar, &mut lift, sigma)
    }

    /// The lift is `w = ln(m y/(1 − m y))`; the update is affine in `w`,
    /// `w⁺ = (4mσ A x̃ + w)/(1 + 4mσ)`, and `y⁺ = σ(w⁺)/m`.
    fn dual_prox_lifted(
        &self,
        x_tilde: ArrayView1<f64>,
        y_bar: ArrayView1<f64>,
        lift: &mut Option<Array1<f64>>,
        sigma: f64,
    ) -> Result<Array1<f64>> {
        let m = self.m() as f64;
        check_dim("dual point", self.m(), y_bar.len())?;
        let w_bar = match lift.take() {
            Some(w) => w,
            None => {
                self.geom_y().check_domain(y_bar, true)?;
                y_bar.mapv(|v| logit(m * v))
            }
        };
        let ax = self.op.apply(x_tilde)?;
        let c = 4.0 * m * sigma;
        let w = (ax * c + &w_bar) / (1.0 + c);
        let y = w.mapv(|t| sigmoid(t) / m);
        *lift = Some(w);
        Ok(y)
    }

    fn problem_id(&self) -> String {
        format!("logreg-m{}-d{}", self.m(), self.d())
    }
}
