//! `min_x max_y (γ_g/2)‖x‖² + ⟨c, x⟩ + ⟨y, Ax⟩ − (γ_h/2)‖y‖² − ⟨d, y⟩`.
//!
//! Euclidean on both sides, with an explicit saddle point; used to check the
//! engine's rate guarantees.

use ndarray::{Array1, Array2, ArrayView1};

use crate::bregman::Geometry;
use crate::engine::SaddleProblem;
use crate::error::{check_dim, Error, Result};
use crate::linop::{power_iteration, Dense, LinearOperator, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_TOL};

#[derive(Debug, Clone)]
pub struct QuadraticSaddle {
    pub a: Dense,
    pub c: Array1<f64>,
    pub d: Array1<f64>,
    pub gamma_g: f64,
    pub gamma_h: f64,
    op_norm: f64,
}

impl QuadraticSaddle {
    /// `op_norm` defaults to the spectral norm of `a`.
    pub fn new(
        a: Array2<f64>,
        c: Array1<f64>,
        d: Array1<f64>,
        gamma_g: f64,
        gamma_h: f64,
        op_norm: Option<f64>,
    ) -> Result<Self> {
        check_dim("linear term c", a.ncols(), c.len())?;
        check_dim("linear term d", a.nrows(), d.len())?;
        if !(gamma_g >= 0.0 && gamma_h >= 0.0) {
            return Err(Error::Config("strong convexity constants must be nonnegative".into()));
        }
        let a = Dense::new(a);
        let op_norm = match op_norm {
            Some(v) => v,
            None => power_iteration(&a, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITERS)?,
        };
        Ok(QuadraticSaddle { a, c, d, gamma_g, gamma_h, op_norm })
    }

    /// `g = ½x²`, `h* = ½y²`, `A = [1]`; the saddle point is the origin.
    pub fn scalar_game() -> Self {
        Self::new(Array2::from_elem((1, 1), 1.0), Array1::zeros(1), Array1::zeros(1), 1.0, 1.0, Some(1.0))
            .expect("valid scalar game")
    }

    /// `L(x, y)`.
    pub fn lagrangian(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
        0.5 * self.gamma_g * x.dot(&x) + self.c.dot(&x) + y.dot(&self.a.matrix.dot(&x))
            - 0.5 * self.gamma_h * y.dot(&y)
            - self.d.dot(&y)
    }
}

impl SaddleProblem for QuadraticSaddle {
    fn operator(&self) -> &dyn LinearOperator {
        &self.a
    }
    fn op_norm(&self) -> f64 {
        self.op_norm
    }
    fn gamma_g(&self) -> f64 {
        self.gamma_g
    }
    fn gamma_h_star(&self) -> f64 {
        self.gamma_h
    }
    fn geom_x(&self) -> Geometry {
        Geometry::Quadratic { scale: 1.0 }
    }
    fn geom_y(&self) -> Geometry {
        Geometry::Quadratic { scale: 1.0 }
    }

    fn primal_prox(&self, y_tilde: ArrayView1<f64>, x_bar: ArrayView1<f64>, tau: f64) -> Result<Array1<f64>> {
        let grad = self.a.adjoint_apply(y_tilde)? + &self.c;
        Ok((&x_bar - &(grad * tau)) / (1.0 + self.gamma_g * tau))
    }

    fn dual_prox(&self, x_tilde: ArrayView1<f64>, y_bar: ArrayView1<f64>, sigma: f64) -> Result<Array1<f64>> {
        let grad = self.a.apply(x_tilde)? - &self.d;
        Ok((&y_bar + &(grad * sigma)) / (1.0 + self.gamma_h * sigma))
    }

    fn problem_id(&self) -> String {
        format!("quadratic-{}x{}", self.a.rows(), self.a.cols())
    }
}
