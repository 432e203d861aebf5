//! Numerical oracles and samplers shared by the integration tests.
//!
//! The oracles minimize the defining objective of each proximal map from
//! its derivative alone, without the closed forms under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use nlpdhg::harness::rng::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 99)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Array1<f64> {
    Array1::from_shape_simple_fn(n, || rng.random_range(lo..hi))
}

pub fn uniform_mat(rng: &mut ChaCha8Rng, m: usize, n: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn((m, n), || rng.random_range(lo..hi))
}

/// Interior point of the simplex, bounded away from the faces.
pub fn simplex_point(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    let v = uniform_vec(rng, n, 0.05, 1.0);
    let s = v.sum();
    v / s
}

/// Root of an increasing function on `[lo, hi]`, to bisection exhaustion.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `argmin Σ_j f_j(x_j)` over the simplex, for separable objectives whose
/// derivatives `fprime(j, x)` increase and tend to `−∞` at `0⁺`.
///
/// Each coordinate solves `f_j′(x) = −μ` by bisection in `ln x`; the
/// multiplier μ is then bisected until the coordinates sum to one.
pub fn simplex_argmin(n: usize, fprime: impl Fn(usize, f64) -> f64) -> Array1<f64> {
    let coord = |j: usize, mu: f64| bisect(|t| fprime(j, t.exp()) + mu, -740.0, 20.0).exp();
    let total = |mu: f64| (0..n).map(|j| coord(j, mu)).sum::<f64>();
    let (mut lo, mut hi) = (-1.0, 1.0);
    while total(lo) < 1.0 {
        lo *= 2.0;
    }
    while total(hi) > 1.0 {
        hi *= 2.0;
    }
    // total is decreasing in μ
    let mu = bisect(|mu| 1.0 - total(mu), lo, hi);
    Array1::from_shape_fn(n, |j| coord(j, mu))
}

/// Minimizer of a convex scalar function from its right derivative.
pub fn scalar_argmin(right_deriv: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    bisect(right_deriv, lo, hi)
}

/// Saddle point of `(γ_g/2)‖x‖² + ⟨c, x⟩ + ⟨y, Ax⟩ − (γ_h/2)‖y‖² − ⟨d, y⟩`
/// from the stationarity system, by LU.
pub fn quadratic_saddle_point(
    a: &Array2<f64>,
    c: &Array1<f64>,
    d: &Array1<f64>,
    gg: f64,
    gh: f64,
) -> (Array1<f64>, Array1<f64>) {
    let (m, n) = a.dim();
    let mut k = DMatrix::<f64>::zeros(n + m, n + m);
    let mut rhs = DVector::<f64>::zeros(n + m);
    for j in 0..n {
        k[(j, j)] = gg;
        rhs[j] = -c[j];
    }
    for i in 0..m {
        k[(n + i, n + i)] = -gh;
        rhs[n + i] = d[i];
        for j in 0..n {
            k[(j, n + i)] = a[(i, j)];
            k[(n + i, j)] = a[(i, j)];
        }
    }
    let z = k.lu().solve(&rhs).expect("nonsingular saddle system");
    (Array1::from_iter(z.rows(0, n).iter().cloned()), Array1::from_iter(z.rows(n, m).iter().cloned()))
}

/// Largest singular value via a dense SVD.
pub fn spectral_norm(a: &Array2<f64>) -> f64 {
    let (m, n) = a.dim();
    let mat = DMatrix::from_fn(m, n, |i, j| a[(i, j)]);
    mat.singular_values().max()
}
