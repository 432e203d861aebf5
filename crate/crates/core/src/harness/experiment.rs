//! Experiment orchestration: builds seeded instances, runs each configured
//! method on them, and emits one row per (method, variant, repetition).
//!
//! Wall times exclude data generation. The nonlinear method's operator norm
//! is computed when the problem is built and is not timed; baselines that
//! need a norm pay for it in their reported time.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::data::{gen_game_data, gen_lasso_data, gen_logreg_data};
use crate::baselines::{
    eta_omwu, eta_pu, fb_logreg_step_size, fista_lasso_step_size, FbLogreg, FistaLasso, GameDynamics, InnerConfig,
    LinearPdhgGame, LinearPdhgLogreg,
};
use crate::engine::{drive, ChangeTest, DiagFlags, Hit, SolveReport, StoppingRule, Watch};
use crate::error::{Error, Result};
use crate::linop::{power_iteration, Dense, LinearOperator, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_TOL};
use crate::numeric::{dist2, sigmoid};
use crate::problems::{L1LogReg, Lasso, MatrixGame};

/// Worker thread count for [`run_experiment`]; defaults to 1.
pub const THREADS_ENV: &str = "NLPDHG_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Logreg,
    Game,
    Lasso,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Logreg => "logreg",
            ProblemKind::Game => "game",
            ProblemKind::Lasso => "lasso",
        }
    }

    pub fn default_lambda(self) -> f64 {
        match self {
            ProblemKind::Logreg => 100.0,
            ProblemKind::Game | ProblemKind::Lasso => 0.1,
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Parse(format!("unknown problem kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Nlpdhg,
    LinearPdhg,
    Fb,
    Fista,
    Pu,
    Omwu,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Nlpdhg => "nlpdhg",
            Method::LinearPdhg => "linear-pdhg",
            Method::Fb => "fb",
            Method::Fista => "fista",
            Method::Pu => "pu",
            Method::Omwu => "omwu",
        }
    }

    pub fn supports(self, kind: ProblemKind) -> bool {
        use Method::*;
        match kind {
            ProblemKind::Logreg => matches!(self, Nlpdhg | LinearPdhg | Fb),
            ProblemKind::Game => matches!(self, Nlpdhg | LinearPdhg | Pu | Omwu),
            ProblemKind::Lasso => matches!(self, Nlpdhg | Fista),
        }
    }

    /// Methods with an ergodic sequence get a second result row.
    pub fn has_ergodic(self) -> bool {
        matches!(self, Method::Nlpdhg | Method::LinearPdhg)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Parse(format!("unknown method `{s}`")))
    }
}

fn default_tol() -> f64 {
    1e-4
}
fn default_max_iters() -> usize {
    100_000
}
fn default_reps() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_noise() -> f64 {
    0.1
}

/// JSON-facing description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ProblemKind,
    pub m: usize,
    /// Columns: `d` for logistic regression, `n` otherwise.
    #[serde(alias = "d")]
    pub n: usize,
    /// Defaults per kind: 100 (logistic), 0.1 (game, Lasso).
    #[serde(default)]
    pub lambda: Option<f64>,
    pub seed: u64,
    pub solvers: Vec<Method>,
    /// Relative change tolerance of every stopping test.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Repetition `r` uses seed `seed + r`.
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    /// When false, `wall_ms` is written as 0 so output is byte-stable.
    #[serde(default = "default_true")]
    pub record_wall_time: bool,
    /// Lasso only: nonzeros of `x_true`, default `⌈n/20⌉`.
    #[serde(default)]
    pub sparsity: Option<usize>,
    /// Lasso only: observation noise level.
    #[serde(default = "default_noise")]
    pub noise: f64,
}

impl ExperimentSpec {
    pub fn new(kind: ProblemKind, m: usize, n: usize, seed: u64, solvers: Vec<Method>) -> Self {
        ExperimentSpec {
            kind,
            m,
            n,
            lambda: None,
            seed,
            solvers,
            tol: default_tol(),
            max_iters: default_max_iters(),
            repetitions: 1,
            record_wall_time: true,
            sparsity: None,
            noise: default_noise(),
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or_else(|| self.kind.default_lambda())
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::Config(format!("sizes must be positive, got {}x{}", self.m, self.n)));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        let l = self.lambda();
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Config(format!("lambda must be positive, got {l}")));
        }
        Ok(())
    }

    /// The problem of repetition `rep`.
    pub fn instance(&self, rep: usize) -> Result<Instance> {
        let seed = self.seed.wrapping_add(rep as u64);
        let lambda = self.lambda();
        Ok(match self.kind {
            ProblemKind::Logreg => Instance::Logreg(L1LogReg::new(gen_logreg_data(self.m, self.n, seed).b, lambda)?),
            ProblemKind::Game => {
                Instance::Game { game: MatrixGame::new(gen_game_data(self.m, self.n, seed), lambda)?, seed }
            }
            ProblemKind::Lasso => {
                let k = self.sparsity.unwrap_or(self.n.div_ceil(20));
                let data = gen_lasso_data(self.m, self.n, k, self.noise, seed);
                Instance::Lasso(Lasso::new(data.a, data.b, lambda)?)
            }
        })
    }
}

/// A built problem. Games carry the seed of their random starting point.
#[derive(Debug, Clone)]
pub enum Instance {
    Logreg(L1LogReg),
    Game { game: MatrixGame, seed: u64 },
    Lasso(Lasso),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Logreg(_) => ProblemKind::Logreg,
            Instance::Game { .. } => ProblemKind::Game,
            Instance::Lasso(_) => ProblemKind::Lasso,
        }
    }

    /// `(m, columns, λ)`.
    pub fn shape(&self) -> (usize, usize, f64) {
        match self {
            Instance::Logreg(p) => (p.m(), p.d(), p.lambda()),
            Instance::Game { game, .. } => (game.m(), game.n(), game.lambda),
            Instance::Lasso(p) => (p.m(), p.n(), p.lambda),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Regular,
    Ergodic,
}

/// Outcome of one method on one instance.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub report: SolveReport,
    /// Time spent on operator norms that count towards the method.
    pub norm_ms: f64,
    pub residual: f64,
    pub ergodic_residual: Option<f64>,
}

impl MethodRun {
    /// Iterations, milliseconds (norms included) and convergence of one
    /// variant, read off the first time its stopping test held.
    pub fn variant_summary(&self, variant: Variant) -> (usize, f64, bool) {
        let slot = match variant {
            Variant::Regular => 0,
            Variant::Ergodic => 1,
        };
        match self.report.hits.get(slot).copied().flatten() {
            Some(Hit { k, ms }) => (k, ms + self.norm_ms, true),
            None => (self.report.k, self.report.wall_ms + self.norm_ms, false),
        }
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64() * 1e3))
}

fn spectral_norm(m: &ndarray::Array2<f64>) -> Result<(f64, f64)> {
    let op = Dense::new(m.clone());
    timed(|| power_iteration(&op, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITERS))
}

fn regular_rule(tol: f64, max_iters: usize, watch: Watch) -> StoppingRule {
    StoppingRule::max_iters(max_iters).with_change(ChangeTest::relative(watch, tol))
}

/// `‖w − σ(Bv)/m‖₂` in the original coefficients.
fn logreg_residual_v(p: &L1LogReg, v: ArrayView1<f64>, w: ArrayView1<f64>) -> f64 {
    let m = p.m() as f64;
    let target: Array1<f64> = p.b().dot(&v).mapv(|t| sigmoid(t) / m);
    dist2(w, target.view())
}

fn game_residual(g: &MatrixGame, x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    g.optimality_residual(x, y).map(|(a, b)| a.max(b)).unwrap_or(f64::NAN)
}

fn ergodic_pair(r: &SolveReport) -> Option<(ArrayView1<'_, f64>, ArrayView1<'_, f64>)> {
    Some((r.ergodic_x.as_ref()?.view(), r.ergodic_y.as_ref()?.view()))
}

/// Runs `method` on `inst` with the experiment stopping rule: relative
/// change `≤ tol` of the dual iterate (and of its ergodic average where one
/// exists), or of the primal iterate for the gradient methods.
pub fn run_method(inst: &Instance, method: Method, tol: f64, max_iters: usize) -> Result<MethodRun> {
    if !method.supports(inst.kind()) {
        return Err(Error::Config(format!(
            "method {} does not apply to {} problems",
            method.name(),
            inst.kind().name()
        )));
    }
    let diag = DiagFlags::default();
    let pair_rule = StoppingRule::dual_change(tol, max_iters);
    let inner = InnerConfig::default();
    let mut norm_ms = 0.0;
    let (report, residual, ergodic_residual) = match (inst, method) {
        (Instance::Logreg(p), Method::Nlpdhg) => {
            let r = p.solve(&pair_rule, &diag)?;
            let res = p.dual_residual(r.x.view(), r.y.view())?;
            let erg = ergodic_pair(&r).map(|(x, y)| p.dual_residual(x, y).unwrap_or(f64::NAN));
            (r, res, erg)
        }
        (Instance::Logreg(p), Method::LinearPdhg) => {
            let (b_norm, ms) = spectral_norm(p.b())?;
            norm_ms = ms;
            let mut it = LinearPdhgLogreg::new(p, b_norm, inner)?;
            let r = drive(&mut it, &pair_rule, &diag)?;
            let res = logreg_residual_v(p, r.x.view(), r.y.view());
            let erg = ergodic_pair(&r).map(|(x, y)| logreg_residual_v(p, x, y));
            (r, res, erg)
        }
        (Instance::Logreg(p), Method::Fb) => {
            let (b_norm, ms) = spectral_norm(p.b())?;
            norm_ms = ms;
            let mut it = FbLogreg::new(p, fb_logreg_step_size(p, b_norm))?;
            let r = drive(&mut it, &FbLogreg::stopping_rule(tol, max_iters), &diag)?;
            let res = logreg_residual_v(p, r.x.view(), r.y.view());
            (r, res, None)
        }
        (Instance::Game { game, seed }, _) => {
            let start = game.random_state(*seed);
            let r = match method {
                Method::Nlpdhg => game.solve(start, &pair_rule, &diag)?,
                Method::LinearPdhg => {
                    let (a_norm, ms) = spectral_norm(&game.a.matrix)?;
                    norm_ms = ms;
                    let mut it = LinearPdhgGame::new(game, a_norm, start.x, start.y, inner)?;
                    drive(&mut it, &pair_rule, &diag)?
                }
                _ => {
                    let (a_norm, ms) = timed(|| Ok(game.a.norm_1_inf()))?;
                    norm_ms = ms;
                    let mut it = if method == Method::Pu {
                        GameDynamics::pu(game, eta_pu(a_norm), start.x, start.y)?
                    } else {
                        GameDynamics::omwu(game, eta_omwu(a_norm.max(f64::MIN_POSITIVE)), start.x, start.y)?
                    };
                    drive(&mut it, &regular_rule(tol, max_iters, Watch::Dual), &diag)?
                }
            };
            let res = game_residual(game, r.x.view(), r.y.view());
            let erg = ergodic_pair(&r).map(|(x, y)| game_residual(game, x, y));
            (r, res, erg)
        }
        (Instance::Lasso(p), Method::Nlpdhg) => {
            let r = p.solve(&pair_rule, &diag)?;
            let res = p.optimality_residual(r.x.view(), r.y.view())?;
            let erg = ergodic_pair(&r).map(|(x, y)| p.optimality_residual(x, y).unwrap_or(f64::NAN));
            (r, res, erg)
        }
        (Instance::Lasso(p), Method::Fista) => {
            let (a_norm, ms) = spectral_norm(&p.a.matrix)?;
            norm_ms = ms;
            let mut it = FistaLasso::new(p, fista_lasso_step_size(p, a_norm))?;
            let r = drive(&mut it, &regular_rule(tol, max_iters, Watch::Primal), &diag)?;
            let y = (p.a.apply(r.x.view())? - &p.b) / p.m() as f64;
            let res = p.optimality_residual(r.x.view(), y.view())?;
            (r, res, None)
        }
        _ => unreachable!("filtered by Method::supports"),
    };
    Ok(MethodRun { method, report, norm_ms, residual, ergodic_residual })
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub solver: String,
    pub variant: Variant,
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
    pub iters: usize,
    pub wall_ms: f64,
    pub residual: f64,
    pub converged: bool,
}

impl ResultRow {
    fn sort_key(&self) -> (&str, Variant, u64) {
        (&self.solver, self.variant, self.seed)
    }
}

fn rows_for(spec: &ExperimentSpec, inst: &Instance, seed: u64, method: Method) -> Vec<ResultRow> {
    let (m, n, lambda) = inst.shape();
    let row = |variant, iters, wall_ms: f64, residual, converged| ResultRow {
        solver: method.name().into(),
        variant,
        m,
        n,
        lambda,
        seed,
        iters,
        wall_ms: if spec.record_wall_time { wall_ms } else { 0.0 },
        residual,
        converged,
    };
    match run_method(inst, method, spec.tol, spec.max_iters) {
        Ok(run) => {
            let (k, ms, ok) = run.variant_summary(Variant::Regular);
            let mut out = vec![row(Variant::Regular, k, ms, run.residual, ok)];
            if let Some(res) = run.ergodic_residual {
                let (k, ms, ok) = run.variant_summary(Variant::Ergodic);
                out.push(row(Variant::Ergodic, k, ms, res, ok));
            }
            out
        }
        Err(e) => {
            eprintln!("{} on seed {seed} failed: {e}", method.name());
            let mut out = vec![row(Variant::Regular, 0, 0.0, f64::NAN, false)];
            if method.has_ergodic() {
                out.push(row(Variant::Ergodic, 0, 0.0, f64::NAN, false));
            }
            out
        }
    }
}

fn thread_count() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&t| t > 0).unwrap_or(1)
}

/// Runs every (repetition, method) pair, in parallel when
/// `NLPDHG_THREADS > 1`. Rows come back sorted by solver, variant, seed.
/// A failing method yields unconverged rows with a NaN residual.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let instances = (0..spec.repetitions)
        .map(|r| Ok((spec.seed.wrapping_add(r as u64), spec.instance(r)?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, Method)> =
        (0..instances.len()).flat_map(|i| spec.solvers.iter().map(move |&s| (i, s))).collect();

    let rows = Arc::new(Mutex::new(Vec::new()));
    let next = AtomicUsize::new(0);
    let workers = thread_count().min(jobs.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, method)) = jobs.get(j) else { break };
                let (seed, inst) = &instances[i];
                let out = rows_for(spec, inst, *seed, method);
                rows.lock().expect("no panics while holding the lock").extend(out);
            });
        }
    });
    let mut rows = Arc::into_inner(rows).expect("workers joined").into_inner().expect("not poisoned");
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(rows)
}

pub fn write_rows<W: Write>(writer: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut rd = csv::Reader::from_reader(reader);
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Reads an [`ExperimentSpec`] from a JSON file.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
