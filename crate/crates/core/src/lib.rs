//! Nonlinear primal-dual hybrid gradient methods with Bregman proximity
//! operators.
//!
//! The crate is organised bottom-up:
//!
//! - [`bregman`]: distance-generating functions and their divergences.
//! - [`linop`]: linear operators and the operator-norm menu.
//! - [`engine`]: the iteration, its step-size regimes, ergodic averages and
//!   the driver loop.
//! - [`problems`]: ℓ1-constrained logistic regression, entropy-regularized
//!   matrix games, the Lasso and a quadratic reference problem.
//! - [`baselines`]: Euclidean PDHG, projected/proximal gradient and
//!   multiplicative-weights game solvers for comparison.
//! - [`harness`]: seeded data generation, fixtures and experiment runs.

// `!(v > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bregman;
pub mod engine;
pub mod error;
pub mod harness;
pub mod linop;
pub mod numeric;
pub mod problems;

pub use bregman::{Geometry, Norm};
pub use engine::{
    delta_diag, linear_rate_params, run, IterateState, Order, Regime, SaddleProblem, SolveReport, StepSchedule,
    StoppingRule,
};
pub use error::{Error, Result};
pub use linop::{Dense, LinearOperator, ScaledConcat};
