use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step-size regime of the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Fixed `τ, σ` with `τσ‖A‖² < 1`; dual step at `2x_{k+1} − x_k`.
    Constant,
    /// Strongly convex `g`: primal step first at an extrapolated dual point.
    AccPrimal,
    /// Strongly convex `h*`: dual step first at an extrapolated primal point.
    AccDual,
    /// Both strongly convex, fixed parameters, primal step first.
    LinearRateXFirst,
    /// Both strongly convex, fixed parameters, dual step first.
    LinearRateYFirst,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Constant => "constant",
            Regime::AccPrimal => "acc-primal",
            Regime::AccDual => "acc-dual",
            Regime::LinearRateXFirst => "linear-rate-x-first",
            Regime::LinearRateYFirst => "linear-rate-y-first",
        }
    }

    /// True when the dual step is taken first.
    pub fn dual_first(&self) -> bool {
        matches!(self, Regime::AccDual | Regime::LinearRateYFirst)
    }
}

/// Which variable the linear-rate method updates first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    XFirst,
    YFirst,
}

/// `(θ_k, τ_k, σ_k)` together with the law that advances them.
///
/// Fields are public so callers can inspect the sequence; the constructors
/// are the only place the regime preconditions are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSchedule {
    pub regime: Regime,
    pub k: usize,
    pub theta: f64,
    pub tau: f64,
    pub sigma: f64,
    pub tau0: f64,
    pub sigma0: f64,
    /// γ_g for `AccPrimal`, γ_{h*} for `AccDual`; unused otherwise.
    pub gamma: f64,
    /// Multiplies θ in the extrapolation. `+1` everywhere except the
    /// reflected matrix-game variant.
    pub extrapolation_sign: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_theta0(theta0: f64) -> Result<()> {
    // θ₀ = 0 switches off the first extrapolation, which the experiments use
    if (0.0..=1.0).contains(&theta0) {
        Ok(())
    } else {
        Err(Error::Config(format!("theta0 must lie in [0, 1], got {theta0}")))
    }
}

/// Parameters `(θ, τ, σ)` of the linear-rate method.
///
/// θ is evaluated as `(4/c) / (√(1 + 4/c) + 1)²` with `c = γ_gγ_{h*}/‖A‖²`,
/// algebraically equal to `1 − (c/2)(√(1 + 4/c) − 1)` but free of
/// cancellation when `c` is large.
pub fn linear_rate_params(gamma_g: f64, gamma_h_star: f64, op_norm: f64) -> Result<(f64, f64, f64)> {
    positive("gamma_g", gamma_g)?;
    positive("gamma_h_star", gamma_h_star)?;
    positive("operator norm", op_norm)?;
    let u = 4.0 * op_norm * op_norm / (gamma_g * gamma_h_star);
    let s = (1.0 + u).sqrt() + 1.0;
    let theta = u / (s * s);
    let tau = (1.0 - theta) / (gamma_g * theta);
    let sigma = (1.0 - theta) / (gamma_h_star * theta);
    Ok((theta, tau, sigma))
}

impl StepSchedule {
    fn base(regime: Regime, theta: f64, tau: f64, sigma: f64, gamma: f64) -> Self {
        StepSchedule { regime, k: 0, theta, tau, sigma, tau0: tau, sigma0: sigma, gamma, extrapolation_sign: 1.0 }
    }

    pub fn constant(tau: f64, sigma: f64, op_norm: f64) -> Result<Self> {
        positive("tau", tau)?;
        positive("sigma", sigma)?;
        let prod = tau * sigma * op_norm * op_norm;
        if !(prod < 1.0) {
            return Err(Error::Config(format!("constant steps need tau*sigma*|A|^2 < 1, got {prod}")));
        }
        Ok(Self::base(Regime::Constant, 1.0, tau, sigma, 0.0))
    }

    /// `τ₀ = 1/(‖A‖²σ₀)`; θ₀ defaults to 1.
    pub fn acc_primal(gamma_g: f64, sigma0: f64, op_norm: f64, theta0: Option<f64>) -> Result<Self> {
        positive("gamma_g", gamma_g)?;
        positive("sigma0", sigma0)?;
        positive("operator norm", op_norm)?;
        let theta0 = theta0.unwrap_or(1.0);
        check_theta0(theta0)?;
        let tau0 = 1.0 / (op_norm * op_norm * sigma0);
        Ok(Self::base(Regime::AccPrimal, theta0, tau0, sigma0, gamma_g))
    }

    /// `σ₀ = 1/(‖A‖²τ₀)`; θ₀ defaults to 0.
    pub fn acc_dual(gamma_h_star: f64, tau0: f64, op_norm: f64, theta0: Option<f64>) -> Result<Self> {
        positive("gamma_h_star", gamma_h_star)?;
        positive("tau0", tau0)?;
        positive("operator norm", op_norm)?;
        let theta0 = theta0.unwrap_or(0.0);
        check_theta0(theta0)?;
        let sigma0 = 1.0 / (op_norm * op_norm * tau0);
        Ok(Self::base(Regime::AccDual, theta0, tau0, sigma0, gamma_h_star))
    }

    pub fn linear_rate(gamma_g: f64, gamma_h_star: f64, op_norm: f64, order: Order) -> Result<Self> {
        let (theta, tau, sigma) = linear_rate_params(gamma_g, gamma_h_star, op_norm)?;
        let regime = match order {
            Order::XFirst => Regime::LinearRateXFirst,
            Order::YFirst => Regime::LinearRateYFirst,
        };
        Ok(Self::base(regime, theta, tau, sigma, 0.0))
    }

    /// Moves from step `k` to step `k + 1`.
    pub fn advance(&mut self) {
        match self.regime {
            Regime::AccPrimal => {
                let theta = 1.0 / (1.0 + self.gamma * self.tau).sqrt();
                self.theta = theta;
                self.tau *= theta;
                self.sigma /= theta;
            }
            Regime::AccDual => {
                let theta = 1.0 / (1.0 + self.gamma * self.sigma).sqrt();
                self.theta = theta;
                self.tau /= theta;
                self.sigma *= theta;
            }
            _ => {}
        }
        self.k += 1;
    }

    /// Natural log of the ergodic weight attached to the iterate produced
    /// by the current step: `1`, `σ_k/σ₀`, `τ_k/τ₀` or `θ^{−k}`.
    pub fn ergodic_log_weight(&self) -> f64 {
        match self.regime {
            Regime::Constant => 0.0,
            Regime::AccPrimal => (self.sigma / self.sigma0).ln(),
            Regime::AccDual => (self.tau / self.tau0).ln(),
            Regime::LinearRateXFirst | Regime::LinearRateYFirst => -(self.k as f64) * self.theta.ln(),
        }
    }

    /// Closed form of `T_K` after `K = self.k` steps for the accelerated
    /// regimes: `‖A‖²(σ_K² − σ₀²)/(γσ₀)` and its dual mirror.
    pub fn closed_form_t(&self, op_norm: f64) -> Option<f64> {
        let l2 = op_norm * op_norm;
        match self.regime {
            Regime::AccPrimal => {
                Some(l2 * (self.sigma * self.sigma - self.sigma0 * self.sigma0) / (self.gamma * self.sigma0))
            }
            Regime::AccDual => Some(l2 * (self.tau * self.tau - self.tau0 * self.tau0) / (self.gamma * self.tau0)),
            _ => None,
        }
    }
}
