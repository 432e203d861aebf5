//! Small scalar and vector kernels shared by the solvers.

use ndarray::{Array1, ArrayView1, Zip};

/// Numerically stable `ln(1 + e^t)`.
#[inline]
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Logistic sigmoid `1 / (1 + e^{-t})`, stable for large |t|.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln(p / (1 - p))` for p in (0, 1).
#[inline]
pub fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

/// Soft-thresholding `sign(z) max(|z| - t, 0)`, applied entrywise.
pub fn shrink1(z: ArrayView1<f64>, t: f64) -> Array1<f64> {
    z.mapv(|v| {
        if v > t {
            v - t
        } else if v < -t {
            v + t
        } else {
            0.0
        }
    })
}

/// `ln sum exp(z)`, shifted by the maximum.
pub fn log_sum_exp(z: ArrayView1<f64>) -> f64 {
    let mx = z.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if !mx.is_finite() {
        return mx;
    }
    mx + z.fold(0.0, |acc, &v| acc + (v - mx).exp()).ln()
}

/// Turns log-weights into a probability vector in place.
pub fn softmax_in_place(z: &mut Array1<f64>) {
    let mx = z.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    z.mapv_inplace(|v| (v - mx).exp());
    let s = z.sum();
    *z /= s;
}

pub fn softmax(z: ArrayView1<f64>) -> Array1<f64> {
    let mut out = z.to_owned();
    softmax_in_place(&mut out);
    out
}

pub fn norm1(x: ArrayView1<f64>) -> f64 {
    x.fold(0.0, |a, &b| a + b.abs())
}

pub fn norm2(x: ArrayView1<f64>) -> f64 {
    x.dot(&x).sqrt()
}

pub fn dist1(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |s, &x, &y| s + (x - y).abs())
}

pub fn dist2(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |s, &x, &y| s + (x - y) * (x - y)).sqrt()
}

pub fn dist_inf(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |s: f64, &x, &y| s.max((x - y).abs()))
}

pub fn all_finite(x: ArrayView1<f64>) -> bool {
    x.iter().all(|v| v.is_finite())
}
