//! Driver loop shared by the PDHG engine and the baselines.

use std::sync::Arc;
use std::time::Instant;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::ErgodicAverage;
use crate::bregman::Norm;
use crate::error::Result;
use crate::numeric::{dist1, dist2, norm1, norm2};

/// Anything the driver can iterate.
pub trait Iterative {
    fn step(&mut self) -> Result<()>;
    fn k(&self) -> usize;
    fn x(&self) -> ArrayView1<'_, f64>;
    fn y(&self) -> ArrayView1<'_, f64>;
    fn x_prev(&self) -> ArrayView1<'_, f64>;
    fn y_prev(&self) -> ArrayView1<'_, f64>;
    /// The weighted average, for methods that define one.
    fn ergodic(&self) -> Option<&ErgodicAverage> {
        None
    }
    fn regime(&self) -> String;
    fn problem_id(&self) -> String;
    /// `Δ_k` at a reference point, for methods that define it.
    fn delta(&self, _x_ref: ArrayView1<f64>, _y_ref: ArrayView1<f64>) -> Option<Result<f64>> {
        None
    }
}

/// Variable a change test watches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Watch {
    Primal,
    Dual,
    ErgodicPrimal,
    ErgodicDual,
}

/// `‖v_{k+1} − v_k‖ ≤ tol` (absolute) or `≤ tol ‖v_{k+1}‖` (relative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeTest {
    pub watch: Watch,
    pub norm: Norm,
    pub relative: bool,
    pub tol: f64,
}

impl ChangeTest {
    pub fn relative(watch: Watch, tol: f64) -> Self {
        ChangeTest { watch, norm: Norm::L2, relative: true, tol }
    }

    pub fn absolute(watch: Watch, tol: f64) -> Self {
        ChangeTest { watch, norm: Norm::L2, relative: false, tol }
    }

    pub fn in_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    /// The tested ratio: change, or change over the new norm.
    fn measure(&self, new: ArrayView1<f64>, old: ArrayView1<f64>) -> f64 {
        let (d, n) = match self.norm {
            Norm::L1 => (dist1(new, old), norm1(new)),
            Norm::L2 => (dist2(new, old), norm2(new)),
        };
        if self.relative {
            if n > 0.0 {
                d / n
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d
        }
    }
}

pub type ResidualFn = Arc<dyn Fn(ArrayView1<f64>, ArrayView1<f64>) -> f64 + Send + Sync>;

/// Conjunction of change tests and an optional residual test, capped by
/// `max_iters`. A rule without tests only stops at the cap, unconverged.
#[derive(Clone)]
pub struct StoppingRule {
    pub max_iters: usize,
    pub changes: Vec<ChangeTest>,
    /// `f(x_k, y_k) ≤ tol`.
    pub residual: Option<(ResidualFn, f64)>,
}

impl std::fmt::Debug for StoppingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StoppingRule")
            .field("max_iters", &self.max_iters)
            .field("changes", &self.changes)
            .field("residual_tol", &self.residual.as_ref().map(|r| r.1))
            .finish()
    }
}

impl StoppingRule {
    pub fn max_iters(max_iters: usize) -> Self {
        StoppingRule { max_iters, changes: Vec::new(), residual: None }
    }

    pub fn with_change(mut self, test: ChangeTest) -> Self {
        self.changes.push(test);
        self
    }

    pub fn with_residual(mut self, f: ResidualFn, tol: f64) -> Self {
        self.residual = Some((f, tol));
        self
    }

    /// Relative dual change `≤ tol` on both `y_k` and the ergodic `Y_K`.
    pub fn dual_change(tol: f64, max_iters: usize) -> Self {
        Self::max_iters(max_iters)
            .with_change(ChangeTest::relative(Watch::Dual, tol))
            .with_change(ChangeTest::relative(Watch::ErgodicDual, tol))
    }

    fn n_tests(&self) -> usize {
        self.changes.len() + usize::from(self.residual.is_some())
    }
}

#[derive(Debug, Clone, Default)]
pub struct DiagFlags {
    /// Record the first test's value every this many iterations (0 = off).
    pub trace_every: usize,
    /// Record `Δ_k` at this reference point every iteration.
    pub delta_reference: Option<(Array1<f64>, Array1<f64>)>,
}

/// First iteration at which a stopping test held, and the elapsed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub k: usize,
    pub ms: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem_id: String,
    pub regime: String,
    pub k: usize,
    pub converged: bool,
    pub wall_ms: f64,
    pub residual_trace: Vec<(usize, f64)>,
    pub terminal_primal_norm: f64,
    pub terminal_dual_norm: f64,
    #[serde(skip)]
    pub x: Array1<f64>,
    #[serde(skip)]
    pub y: Array1<f64>,
    #[serde(skip)]
    pub ergodic_x: Option<Array1<f64>>,
    #[serde(skip)]
    pub ergodic_y: Option<Array1<f64>>,
    /// `ln T_K` of the ergodic weights.
    #[serde(skip)]
    pub log_t: Option<f64>,
    /// `Δ_0, Δ_1, …` when requested.
    #[serde(skip)]
    pub delta_trace: Vec<f64>,
    /// Per test, in order (change tests, then residual).
    #[serde(skip)]
    pub hits: Vec<Option<Hit>>,
}

impl SolveReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Iterates `it` until every test in `stop` holds at the same iteration or
/// `max_iters` steps have been taken.
pub fn drive<I: Iterative + ?Sized>(it: &mut I, stop: &StoppingRule, diag: &DiagFlags) -> Result<SolveReport> {
    let start = Instant::now();
    let n_tests = stop.n_tests();
    let mut hits: Vec<Option<Hit>> = vec![None; n_tests];
    let mut trace = Vec::new();
    let mut delta_trace = Vec::new();
    let mut converged = false;
    let mut prev_erg: Option<(Array1<f64>, Array1<f64>)> = None;

    let record_delta = |it: &I, out: &mut Vec<f64>| -> Result<()> {
        if let Some((xr, yr)) = &diag.delta_reference {
            if let Some(d) = it.delta(xr.view(), yr.view()) {
                out.push(d?);
            }
        }
        Ok(())
    };
    record_delta(it, &mut delta_trace)?;

    while it.k() < stop.max_iters {
        it.step()?;
        let k = it.k();
        record_delta(it, &mut delta_trace)?;

        let erg = it.ergodic().filter(|e| !e.is_empty()).map(|e| (e.x(), e.y()));
        let mut values = Vec::with_capacity(n_tests);
        let mut all = n_tests > 0;
        for test in &stop.changes {
            let v = match test.watch {
                Watch::Primal => test.measure(it.x(), it.x_prev()),
                Watch::Dual => test.measure(it.y(), it.y_prev()),
                Watch::ErgodicPrimal | Watch::ErgodicDual => match (&erg, &prev_erg) {
                    (Some((ex, ey)), Some((px, py))) => {
                        if test.watch == Watch::ErgodicPrimal {
                            test.measure(ex.view(), px.view())
                        } else {
                            test.measure(ey.view(), py.view())
                        }
                    }
                    _ => f64::INFINITY,
                },
            };
            values.push((v, test.tol));
        }
        if let Some((f, tol)) = &stop.residual {
            values.push((f(it.x(), it.y()), *tol));
        }
        let ms = start.elapsed().as_secs_f64() * 1e3;
        for (slot, &(v, tol)) in hits.iter_mut().zip(&values) {
            let ok = v <= tol;
            all &= ok;
            if ok && slot.is_none() {
                *slot = Some(Hit { k, ms });
            }
        }
        if diag.trace_every > 0 && k.is_multiple_of(diag.trace_every) {
            if let Some(&(v, _)) = values.first() {
                trace.push((k, v));
            }
        }
        prev_erg = erg;
        if all {
            converged = true;
            break;
        }
    }

    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let ergodic = it.ergodic().filter(|e| !e.is_empty());
    Ok(SolveReport {
        problem_id: it.problem_id(),
        regime: it.regime(),
        k: it.k(),
        converged,
        wall_ms,
        residual_trace: trace,
        terminal_primal_norm: norm2(it.x()),
        terminal_dual_norm: norm2(it.y()),
        x: it.x().to_owned(),
        y: it.y().to_owned(),
        ergodic_x: ergodic.map(|e| e.x()),
        ergodic_y: ergodic.map(|e| e.y()),
        log_t: ergodic.map(|e| e.log_t()),
        delta_trace,
        hits,
    })
}
