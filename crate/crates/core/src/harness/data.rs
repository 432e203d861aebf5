//! Synthetic instances for the three problem families.

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::stream_rng;

#[derive(Debug, Clone)]
pub struct LogRegData {
    /// Rows `−b_i u_i`.
    pub b: Array2<f64>,
    pub true_v: Array1<f64>,
    /// `±1`.
    pub labels: Array1<f64>,
    pub features: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct LogRegOptions {
    /// Add unit Gaussian label noise.
    pub noise: bool,
    /// Overrides the random sparse coefficient vector.
    pub true_v: Option<Array1<f64>>,
}

impl Default for LogRegOptions {
    fn default() -> Self {
        LogRegOptions { noise: true, true_v: None }
    }
}

fn normal_matrix(m: usize, n: usize, seed: u64, stream: u64) -> Array2<f64> {
    let mut rng = stream_rng(seed, stream);
    Array2::from_shape_simple_fn((m, n), || rng.sample(StandardNormal))
}

fn normal_vector(n: usize, seed: u64, stream: u64) -> Array1<f64> {
    let mut rng = stream_rng(seed, stream);
    Array1::from_shape_simple_fn(n, || rng.sample(StandardNormal))
}

/// Gaussian features, `⌈d/100⌉` coefficients equal to 10 at random
/// positions, labels `sign(⟨u_i, v⟩ + ξ_i)` (zero maps to `+1`).
pub fn gen_logreg_data(m: usize, d: usize, seed: u64) -> LogRegData {
    gen_logreg_data_with(m, d, seed, &LogRegOptions::default())
}

pub fn gen_logreg_data_with(m: usize, d: usize, seed: u64, opts: &LogRegOptions) -> LogRegData {
    let features = normal_matrix(m, d, seed, 0);
    let true_v = match &opts.true_v {
        Some(v) => {
            assert_eq!(v.len(), d, "coefficient override has the wrong length");
            v.clone()
        }
        None => {
            let k = d.div_ceil(100);
            let mut v = Array1::zeros(d);
            for j in sample(&mut stream_rng(seed, 2), d, k) {
                v[j] = 10.0;
            }
            v
        }
    };
    let mut score = features.dot(&true_v);
    if opts.noise {
        score += &normal_vector(m, seed, 1);
    }
    let labels = score.mapv(|s| if s >= 0.0 { 1.0 } else { -1.0 });
    let mut b = features.clone();
    for (mut row, &l) in b.rows_mut().into_iter().zip(&labels) {
        row *= -l;
    }
    LogRegData { b, true_v, labels, features }
}

/// I.i.d. uniform `[−1, 1]` payoffs.
pub fn gen_game_data(m: usize, n: usize, seed: u64) -> Array2<f64> {
    let mut rng = stream_rng(seed, 0);
    Array2::from_shape_simple_fn((m, n), || rng.random_range(-1.0..=1.0))
}

#[derive(Debug, Clone)]
pub struct LassoData {
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    pub x_true: Array1<f64>,
}

/// Gaussian design, `sparsity` entries of `x_true` equal to `±1`,
/// `b = A x_true + noise·ξ`.
pub fn gen_lasso_data(m: usize, n: usize, sparsity: usize, noise: f64, seed: u64) -> LassoData {
    let a = normal_matrix(m, n, seed, 0);
    let mut x_true = Array1::zeros(n);
    let mut signs = stream_rng(seed, 2);
    for j in sample(&mut stream_rng(seed, 1), n, sparsity.min(n)) {
        x_true[j] = if signs.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    let b = a.dot(&x_true) + normal_vector(m, seed, 3) * noise;
    LassoData { a, b, x_true }
}
