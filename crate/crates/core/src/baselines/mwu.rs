//! Predictive update (PU) and optimistic multiplicative weights (OMWU) for
//! the entropy-regularized game, `y` maximizing and `x` minimizing.
//!
//! Both use the tempered step `p⁺ ∝ p^{1−ηλ} e^{±η g}`. PU predicts from the
//! current iterates and then corrects from the prediction; OMWU predicts
//! from the previous prediction, saving one pair of products per step.

use ndarray::{Array1, ArrayView1};

use crate::engine::Iterative;
use crate::error::{check_dim, Error, Result};
use crate::linop::transpose_dot;
use crate::numeric::{all_finite, softmax_in_place};
use crate::problems::MatrixGame;

/// `η = 1/(2 + ‖A‖_{1,∞})`.
pub fn eta_pu(a_norm: f64) -> f64 {
    1.0 / (2.0 + a_norm)
}

/// `η = min{1/(2 + 2‖A‖_{1,∞}), 1/(4‖A‖_{1,∞})}`.
pub fn eta_omwu(a_norm: f64) -> f64 {
    (1.0 / (2.0 + 2.0 * a_norm)).min(1.0 / (4.0 * a_norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Pu,
    Omwu,
}

/// Shared state of the two game dynamics.
pub struct GameDynamics<'a> {
    problem: &'a MatrixGame,
    kind: Kind,
    eta: f64,
    k: usize,
    x: Array1<f64>,
    x_prev: Array1<f64>,
    y: Array1<f64>,
    y_prev: Array1<f64>,
    // OMWU's running predictions
    x_hat: Array1<f64>,
    y_hat: Array1<f64>,
}

pub type Pu<'a> = GameDynamics<'a>;
pub type Omwu<'a> = GameDynamics<'a>;

fn tempered(p: &Array1<f64>, g: &Array1<f64>, eta: f64, keep: f64) -> Array1<f64> {
    let mut z = ndarray::Zip::from(p).and(g).map_collect(|&p, &g| keep * p.ln() + eta * g);
    softmax_in_place(&mut z);
    z
}

impl<'a> GameDynamics<'a> {
    fn new(problem: &'a MatrixGame, kind: Kind, eta: f64, x0: Array1<f64>, y0: Array1<f64>) -> Result<Self> {
        check_dim("primal start", problem.n(), x0.len())?;
        check_dim("dual start", problem.m(), y0.len())?;
        if !(eta > 0.0 && eta * problem.lambda < 1.0) {
            return Err(Error::Config(format!("learning rate {eta} must satisfy 0 < eta*lambda < 1")));
        }
        Ok(GameDynamics {
            problem,
            kind,
            eta,
            k: 0,
            x_prev: x0.clone(),
            x_hat: x0.clone(),
            x: x0,
            y_prev: y0.clone(),
            y_hat: y0.clone(),
            y: y0,
        })
    }

    pub fn pu(problem: &'a MatrixGame, eta: f64, x0: Array1<f64>, y0: Array1<f64>) -> Result<Self> {
        Self::new(problem, Kind::Pu, eta, x0, y0)
    }

    pub fn omwu(problem: &'a MatrixGame, eta: f64, x0: Array1<f64>, y0: Array1<f64>) -> Result<Self> {
        Self::new(problem, Kind::Omwu, eta, x0, y0)
    }
}

impl Iterative for GameDynamics<'_> {
    fn step(&mut self) -> Result<()> {
        let a = &self.problem.a.matrix;
        let keep = 1.0 - self.eta * self.problem.lambda;
        let eta = self.eta;
        let (x_hat, y_hat) = match self.kind {
            Kind::Pu => (
                tempered(&self.x, &-transpose_dot(a, self.y.view()), eta, keep),
                tempered(&self.y, &a.dot(&self.x), eta, keep),
            ),
            Kind::Omwu => (
                tempered(&self.x, &-transpose_dot(a, self.y_hat.view()), eta, keep),
                tempered(&self.y, &a.dot(&self.x_hat), eta, keep),
            ),
        };
        let x_new = tempered(&self.x, &-transpose_dot(a, y_hat.view()), eta, keep);
        let y_new = tempered(&self.y, &a.dot(&x_hat), eta, keep);
        if !(all_finite(x_new.view()) && all_finite(y_new.view())) {
            return Err(Error::NonFinite { what: "game iterate", iteration: self.k + 1 });
        }
        self.x_hat = x_hat;
        self.y_hat = y_hat;
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
    fn regime(&self) -> String {
        match self.kind {
            Kind::Pu => "pu".into(),
            Kind::Omwu => "omwu".into(),
        }
    }
    fn problem_id(&self) -> String {
        format!("game-m{}-n{}", self.problem.m(), self.problem.n())
    }
}
