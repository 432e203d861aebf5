//! `nlpdhg`: generate seeded problems, solve them, and run experiment specs.

// `!(v > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use nlpdhg::harness::{
    load_fixture, load_spec, run_experiment, run_method, save_fixture, write_rows, ExperimentSpec, Method, ProblemKind,
    THREADS_ENV,
};

#[derive(Parser)]
#[command(name = "nlpdhg", version, about = "Nonlinear PDHG solvers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded problem instance (matrix CSV + JSON sidecar) to a directory.
    GenData {
        #[arg(long)]
        kind: ProblemKind,
        #[arg(long)]
        m: usize,
        /// Columns (alias --n).
        #[arg(long, visible_alias = "n")]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults: 100 for logreg, 0.1 otherwise.
        #[arg(long)]
        lambda: Option<f64>,
        /// Lasso: nonzeros in the planted solution.
        #[arg(long)]
        sparsity: Option<usize>,
        /// Lasso: observation noise level.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a stored problem and write a JSON report.
    Solve {
        /// Sidecar JSON, or the directory holding it.
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value = "nlpdhg")]
        method: Method,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        /// Defaults to standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run an experiment spec and write the results CSV.
    #[command(after_help = format!("Worker threads are read from {THREADS_ENV} (default 1)."))]
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::GenData { kind, m, d, seed, lambda, sparsity, noise, out } => {
            let mut spec = ExperimentSpec::new(kind, m, d, seed, Vec::new());
            spec.lambda = lambda;
            spec.sparsity = sparsity;
            spec.noise = noise;
            spec.validate()?;
            let inst = spec.instance(0)?;
            let path = save_fixture(&out, &inst).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("wrote {}", path.display());
        }
        Command::Solve { problem, method, tol, max_iters, report } => {
            if !(tol > 0.0) {
                bail!("--tol must be positive");
            }
            let (inst, _) = load_fixture(&problem).with_context(|| format!("loading {}", problem.display()))?;
            let run = run_method(&inst, method, tol, max_iters)?;
            let json = run.report.to_json()?;
            match report {
                Some(p) => std::fs::write(&p, json).with_context(|| format!("writing {}", p.display()))?,
                None => println!("{json}"),
            }
            eprintln!(
                "{}: k = {}, converged = {}, residual = {:.3e}",
                method.name(),
                run.report.k,
                run.report.converged,
                run.residual
            );
        }
        Command::Bench { spec, out } => {
            let spec = load_spec(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let rows = run_experiment(&spec)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_rows(BufWriter::new(file), &rows)?;
            eprintln!("{} rows -> {}", rows.len(), out.display());
        }
    }
    Ok(())
}
