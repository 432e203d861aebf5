//! Seeded data generation, problem fixtures, and the experiment runner.

pub mod data;
pub mod experiment;
pub mod fixtures;
pub mod rng;

pub use data::{
    gen_game_data, gen_lasso_data, gen_logreg_data, gen_logreg_data_with, LassoData, LogRegData, LogRegOptions,
};
pub use experiment::{
    load_spec, read_rows, run_experiment, run_method, write_rows, ExperimentSpec, Instance, Method, MethodRun,
    ProblemKind, ResultRow, Variant, THREADS_ENV,
};
pub use fixtures::{load_fixture, save_fixture, FixtureMeta};
