//! The nonlinear PDHG iteration.
//!
//! Each step alternates two Bregman proximal maps,
//!
//! ```text
//! x̂ = argmin_x  g(x) + ⟨ỹ, A x⟩ + D_X(x, x̄)/τ
//! ŷ = argmax_y −h*(y) + ⟨y, A x̃⟩ − D_Y(y, ȳ)/σ
//! ```
//!
//! with the extrapolated points `x̃, ỹ` and the step sizes chosen by the
//! [`StepSchedule`] regime.

mod driver;
mod schedule;

pub use driver::{drive, ChangeTest, DiagFlags, Hit, Iterative, ResidualFn, SolveReport, StoppingRule, Watch};
pub use schedule::{linear_rate_params, Order, Regime, StepSchedule};

use ndarray::{Array1, ArrayView1};

use crate::bregman::Geometry;
use crate::error::{check_dim, Error, Result};
use crate::linop::LinearOperator;
use crate::numeric::all_finite;

/// A convex-concave saddle problem `min_x max_y g(x) + ⟨y, Ax⟩ − h*(y)`
/// described through its two proximal maps.
pub trait SaddleProblem: Send + Sync {
    fn operator(&self) -> &dyn LinearOperator;
    /// Norm of `A` compatible with the two geometries.
    fn op_norm(&self) -> f64;
    /// Strong convexity of `g` relative to `φ_X`; zero when absent.
    fn gamma_g(&self) -> f64;
    /// Strong convexity of `h*` relative to `φ_Y`; zero when absent.
    fn gamma_h_star(&self) -> f64;
    fn geom_x(&self) -> Geometry;
    fn geom_y(&self) -> Geometry;

    /// `argmin_x g(x) + ⟨ỹ, Ax⟩ + D_X(x, x̄)/τ`.
    fn primal_prox(&self, y_tilde: ArrayView1<f64>, x_bar: ArrayView1<f64>, tau: f64) -> Result<Array1<f64>>;

    /// `argmax_y −h*(y) + ⟨y, Ax̃⟩ − D_Y(y, ȳ)/σ`.
    fn dual_prox(&self, x_tilde: ArrayView1<f64>, y_bar: ArrayView1<f64>, sigma: f64) -> Result<Array1<f64>>;

    /// Dual prox for problems that carry an auxiliary representation of the
    /// dual iterate (for instance its mirror image `∇φ_Y(y)`). `lift` holds
    /// the representation of `y_bar` on entry and of the result on exit.
    fn dual_prox_lifted(
        &self,
        x_tilde: ArrayView1<f64>,
        y_bar: ArrayView1<f64>,
        lift: &mut Option<Array1<f64>>,
        sigma: f64,
    ) -> Result<Array1<f64>> {
        let _ = lift;
        self.dual_prox(x_tilde, y_bar, sigma)
    }

    fn problem_id(&self) -> String {
        format!("saddle-{}x{}", self.operator().rows(), self.operator().cols())
    }
}

/// Weighted running averages `X_K = Σ w_k x_k / T_K`, `Y_K = Σ w_k y_k / T_K`.
///
/// Weights arrive as logarithms and the sums are kept relative to a moving
/// scale, so geometrically growing weights never overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicAverage {
    sum_x: Array1<f64>,
    sum_y: Array1<f64>,
    total: f64,
    log_scale: f64,
}

const RESCALE_AT: f64 = 300.0;

impl ErgodicAverage {
    pub fn new(nx: usize, ny: usize) -> Self {
        ErgodicAverage { sum_x: Array1::zeros(nx), sum_y: Array1::zeros(ny), total: 0.0, log_scale: 0.0 }
    }

    pub fn add(&mut self, log_weight: f64, x: ArrayView1<f64>, y: ArrayView1<f64>) {
        if self.total == 0.0 {
            self.log_scale = log_weight;
        } else if log_weight - self.log_scale > RESCALE_AT {
            let f = (self.log_scale - log_weight).exp();
            self.sum_x *= f;
            self.sum_y *= f;
            self.total *= f;
            self.log_scale = log_weight;
        }
        let w = (log_weight - self.log_scale).exp();
        self.sum_x.scaled_add(w, &x);
        self.sum_y.scaled_add(w, &y);
        self.total += w;
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0.0
    }

    pub fn x(&self) -> Array1<f64> {
        &self.sum_x / self.total
    }

    pub fn y(&self) -> Array1<f64> {
        &self.sum_y / self.total
    }

    /// `ln T_K`.
    pub fn log_t(&self) -> f64 {
        self.total.ln() + self.log_scale
    }

    /// `T_K`; infinite once it exceeds the `f64` range.
    pub fn t(&self) -> f64 {
        self.log_t().exp()
    }
}

/// Current and previous iterates plus the ergodic sums.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub k: usize,
    pub x: Array1<f64>,
    pub x_prev: Array1<f64>,
    pub y: Array1<f64>,
    pub y_prev: Array1<f64>,
    /// Optional lifted dual variable; see [`SaddleProblem::dual_prox_lifted`].
    pub lift: Option<Array1<f64>>,
    pub ergodic: ErgodicAverage,
}

impl IterateState {
    /// Starts at `(x₀, y₀)` with `x₋₁ = x₀`, `y₋₁ = y₀`.
    pub fn new(x0: Array1<f64>, y0: Array1<f64>) -> Self {
        let ergodic = ErgodicAverage::new(x0.len(), y0.len());
        IterateState { k: 0, x_prev: x0.clone(), x: x0, y_prev: y0.clone(), y: y0, lift: None, ergodic }
    }

    pub fn with_lift(mut self, lift: Array1<f64>) -> Self {
        self.lift = Some(lift);
        self
    }

    pub fn check_dims<P: SaddleProblem + ?Sized>(&self, problem: &P) -> Result<()> {
        let op = problem.operator();
        check_dim("primal iterate", op.cols(), self.x.len())?;
        check_dim("dual iterate", op.rows(), self.y.len())
    }
}

fn extrapolate(cur: &Array1<f64>, prev: &Array1<f64>, coef: f64) -> Array1<f64> {
    if coef == 0.0 {
        cur.clone()
    } else {
        cur + &((cur - prev) * coef)
    }
}

/// One iteration of the active regime, `state_k → state_{k+1}`.
///
/// The schedule is read, not advanced; ergodic sums are left untouched.
pub fn step<P: SaddleProblem + ?Sized>(problem: &P, state: &mut IterateState, sched: &StepSchedule) -> Result<()> {
    let iteration = state.k + 1;
    let coef = sched.extrapolation_sign * sched.theta;
    let (x_new, y_new) = match sched.regime {
        Regime::Constant => {
            let x_new = problem.primal_prox(state.y.view(), state.x.view(), sched.tau)?;
            ensure_finite(&x_new, "primal iterate", iteration)?;
            let x_tilde = &x_new * 2.0 - &state.x;
            let y_new = problem.dual_prox_lifted(x_tilde.view(), state.y.view(), &mut state.lift, sched.sigma)?;
            (x_new, y_new)
        }
        Regime::AccPrimal | Regime::LinearRateXFirst => {
            let y_tilde = extrapolate(&state.y, &state.y_prev, coef);
            let x_new = problem.primal_prox(y_tilde.view(), state.x.view(), sched.tau)?;
            ensure_finite(&x_new, "primal iterate", iteration)?;
            let y_new = problem.dual_prox_lifted(x_new.view(), state.y.view(), &mut state.lift, sched.sigma)?;
            (x_new, y_new)
        }
        Regime::AccDual | Regime::LinearRateYFirst => {
            let x_tilde = extrapolate(&state.x, &state.x_prev, coef);
            let y_new = problem.dual_prox_lifted(x_tilde.view(), state.y.view(), &mut state.lift, sched.sigma)?;
            ensure_finite(&y_new, "dual iterate", iteration)?;
            let x_new = problem.primal_prox(y_new.view(), state.x.view(), sched.tau)?;
            (x_new, y_new)
        }
    };
    ensure_finite(&x_new, "primal iterate", iteration)?;
    ensure_finite(&y_new, "dual iterate", iteration)?;
    state.x_prev = std::mem::replace(&mut state.x, x_new);
    state.y_prev = std::mem::replace(&mut state.y, y_new);
    state.k = iteration;
    Ok(())
}

fn ensure_finite(v: &Array1<f64>, what: &'static str, iteration: usize) -> Result<()> {
    if all_finite(v.view()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, iteration })
    }
}

fn require(sched: &StepSchedule, ok: bool, name: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} called with a {} schedule", sched.regime.name())))
    }
}

/// Basic method: `x_{k+1} = prox(y_k)`, `y_{k+1} = prox(2x_{k+1} − x_k)`.
pub fn step_constant<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &mut IterateState,
    sched: &StepSchedule,
) -> Result<()> {
    require(sched, sched.regime == Regime::Constant, "step_constant")?;
    step(problem, state, sched)
}

/// Primal-accelerated step; advances the schedule.
pub fn step_acc_primal<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &mut IterateState,
    sched: &mut StepSchedule,
) -> Result<()> {
    require(sched, sched.regime == Regime::AccPrimal, "step_acc_primal")?;
    step(problem, state, sched)?;
    sched.advance();
    Ok(())
}

/// Dual-accelerated step; advances the schedule.
pub fn step_acc_dual<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &mut IterateState,
    sched: &mut StepSchedule,
) -> Result<()> {
    require(sched, sched.regime == Regime::AccDual, "step_acc_dual")?;
    step(problem, state, sched)?;
    sched.advance();
    Ok(())
}

/// Linear-rate step in either order.
pub fn step_linear_rate<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &mut IterateState,
    sched: &mut StepSchedule,
) -> Result<()> {
    require(sched, matches!(sched.regime, Regime::LinearRateXFirst | Regime::LinearRateYFirst), "step_linear_rate")?;
    step(problem, state, sched)?;
    sched.advance();
    Ok(())
}

/// The Lyapunov quantity `Δ_k(x, y)` of the active regime at the reference
/// point `(x, y)`, using the step sizes the schedule holds for step `k`.
///
/// At a saddle point it is nonnegative and, depending on the regime,
/// non-increasing or geometrically decreasing.
pub fn delta_diag<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &IterateState,
    sched: &StepSchedule,
    x_ref: ArrayView1<f64>,
    y_ref: ArrayView1<f64>,
) -> Result<f64> {
    let gx = problem.geom_x();
    let gy = problem.geom_y();
    let op = problem.operator();
    let (tau, sigma, theta) = (sched.tau, sched.sigma, sched.theta);
    let base = gx.divergence(x_ref, state.x.view())? / tau + gy.divergence(y_ref, state.y.view())? / sigma;
    let dx = &x_ref - &state.x;
    let dy = &y_ref - &state.y;
    let value = match sched.regime {
        Regime::Constant => base - dy.dot(&op.apply(dx.view())?),
        Regime::AccPrimal | Regime::LinearRateXFirst => {
            // for AccPrimal θ_k/σ_{k−1} = 1/σ_k, so both share θ/σ_{k−1}
            let coef = if sched.regime == Regime::AccPrimal { 1.0 / sigma } else { theta / sigma };
            let step_y = &state.y - &state.y_prev;
            base + coef * gy.divergence(state.y.view(), state.y_prev.view())?
                + theta * step_y.dot(&op.apply(dx.view())?)
        }
        Regime::AccDual | Regime::LinearRateYFirst => {
            // mirror image of the primal-first form under x ↔ y, A ↔ −Aᵀ,
            // which flips the sign of the coupling
            let coef = if sched.regime == Regime::AccDual { 1.0 / tau } else { theta / tau };
            let step_x = &state.x - &state.x_prev;
            base + coef * gx.divergence(state.x.view(), state.x_prev.view())?
                - theta * dy.dot(&op.apply(step_x.view())?)
        }
    };
    Ok(value)
}

/// A PDHG run in progress: problem, schedule and iterates.
pub struct Pdhg<'a, P: SaddleProblem + ?Sized> {
    pub problem: &'a P,
    pub schedule: StepSchedule,
    pub state: IterateState,
}

impl<'a, P: SaddleProblem + ?Sized> Pdhg<'a, P> {
    pub fn new(problem: &'a P, schedule: StepSchedule, state: IterateState) -> Result<Self> {
        state.check_dims(problem)?;
        match schedule.regime {
            Regime::AccPrimal if !(problem.gamma_g() > 0.0) => {
                return Err(Error::Config("acc-primal needs gamma_g > 0".into()))
            }
            Regime::AccDual if !(problem.gamma_h_star() > 0.0) => {
                return Err(Error::Config("acc-dual needs gamma_h_star > 0".into()))
            }
            Regime::LinearRateXFirst | Regime::LinearRateYFirst
                if !(problem.gamma_g() > 0.0 && problem.gamma_h_star() > 0.0) =>
            {
                return Err(Error::Config("linear-rate regime needs both strong convexity constants".into()))
            }
            _ => {}
        }
        Ok(Pdhg { problem, schedule, state })
    }
}

impl<P: SaddleProblem + ?Sized> Iterative for Pdhg<'_, P> {
    fn step(&mut self) -> Result<()> {
        let log_w = self.schedule.ergodic_log_weight();
        step(self.problem, &mut self.state, &self.schedule)?;
        self.state.ergodic.add(log_w, self.state.x.view(), self.state.y.view());
        self.schedule.advance();
        Ok(())
    }
    fn k(&self) -> usize {
        self.state.k
    }
    fn x(&self) -> ArrayView1<'_, f64> {
        self.state.x.view()
    }
    fn y(&self) -> ArrayView1<'_, f64> {
        self.state.y.view()
    }
    fn x_prev(&self) -> ArrayView1<'_, f64> {
        self.state.x_prev.view()
    }
    fn y_prev(&self) -> ArrayView1<'_, f64> {
        self.state.y_prev.view()
    }
    fn ergodic(&self) -> Option<&ErgodicAverage> {
        Some(&self.state.ergodic)
    }
    fn regime(&self) -> String {
        self.schedule.regime.name().to_string()
    }
    fn problem_id(&self) -> String {
        self.problem.problem_id()
    }
    fn delta(&self, x_ref: ArrayView1<f64>, y_ref: ArrayView1<f64>) -> Option<Result<f64>> {
        Some(delta_diag(self.problem, &self.state, &self.schedule, x_ref, y_ref))
    }
}

/// Runs the iteration from `init` until `stop` fires.
pub fn run<P: SaddleProblem + ?Sized>(
    problem: &P,
    schedule: StepSchedule,
    init: IterateState,
    stop: &StoppingRule,
    diag: &DiagFlags,
) -> Result<SolveReport> {
    let mut solver = Pdhg::new(problem, schedule, init)?;
    drive(&mut solver, stop, diag)
}
