//! Distance-generating functions and their Bregman divergences.
//!
//! Three geometries cover every problem in the crate: a scaled quadratic,
//! the negative entropy (on the simplex, or the positive orthant), and an
//! average of binary entropies on the box `[0, 1/m]^m`.

use ndarray::{Array1, ArrayView1, Zip};

use crate::error::{check_dim, Error, Result};

/// Interior-required arguments of entropy geometries must exceed this.
pub const DOMAIN_FLOOR: f64 = 1e-300;

/// Norm in which a geometry is strongly convex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// `φ(x) = (c/2)‖x‖²`.
    Quadratic { scale: f64 },
    /// `φ(x) = Σ x_j ln x_j` with `0 ln 0 = 0`.
    NegEntropy,
    /// `φ(y) = scale · (1/m) Σ [m y_i ln(m y_i) + (1 − m y_i) ln(1 − m y_i)]`.
    BinaryEntropyAvg { m: usize, scale: f64 },
}

#[inline]
fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// `a ln(a/b)` with the `0 ln 0 = 0` convention; `b` must be interior.
#[inline]
fn xlog_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * (a / b).ln()
    }
}

fn check_finite(x: ArrayView1<f64>) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("non-finite input".into()))
    }
}

impl Geometry {
    pub fn quadratic(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("quadratic scale must be positive, got {scale}")));
        }
        Ok(Geometry::Quadratic { scale })
    }

    /// The averaged binary entropy with the scale `1/(4m)` that makes it
    /// 1-strongly convex in the Euclidean norm.
    pub fn logistic_dual(m: usize) -> Self {
        Geometry::BinaryEntropyAvg { m, scale: 1.0 / (4.0 * m as f64) }
    }

    /// Norm and modulus of strong convexity on the domain.
    pub fn strong_convexity(&self) -> (Norm, f64) {
        match *self {
            Geometry::Quadratic { scale } => (Norm::L2, scale),
            Geometry::NegEntropy => (Norm::L1, 1.0),
            // second derivative of each term is m²·scale/m·1/(t(1−t)) ≥ 4m·scale
            Geometry::BinaryEntropyAvg { m, scale } => (Norm::L2, 4.0 * m as f64 * scale),
        }
    }

    /// Checks `x` against the closed domain (`interior = false`) or the
    /// interior up to [`DOMAIN_FLOOR`] (`interior = true`).
    pub fn check_domain(&self, x: ArrayView1<f64>, interior: bool) -> Result<()> {
        check_finite(x)?;
        match *self {
            Geometry::Quadratic { .. } => Ok(()),
            Geometry::NegEntropy => {
                let lo = if interior { DOMAIN_FLOOR } else { 0.0 };
                match x.iter().find(|&&v| v < lo || (interior && v == 0.0)) {
                    Some(v) => Err(Error::Domain(format!("entropy argument {v:e} below {lo:e}"))),
                    None => Ok(()),
                }
            }
            Geometry::BinaryEntropyAvg { m, .. } => {
                check_dim("binary entropy dimension", m, x.len())?;
                let mf = m as f64;
                for &v in x.iter() {
                    let t = mf * v;
                    let bad =
                        if interior { t < DOMAIN_FLOOR || 1.0 - t < DOMAIN_FLOOR } else { !(0.0..=1.0).contains(&t) };
                    if bad {
                        return Err(Error::Domain(format!("{v:e} outside the box [0, 1/{m}]")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, x: ArrayView1<f64>) -> Result<f64> {
        self.check_domain(x, false)?;
        Ok(match *self {
            Geometry::Quadratic { scale } => 0.5 * scale * x.dot(&x),
            Geometry::NegEntropy => x.iter().map(|&v| xlogx(v)).sum(),
            Geometry::BinaryEntropyAvg { m, scale } => {
                let mf = m as f64;
                let s: f64 = x.iter().map(|&v| xlogx(mf * v) + xlogx(1.0 - mf * v)).sum();
                scale * s / mf
            }
        })
    }

    pub fn gradient(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_domain(x, true)?;
        Ok(match *self {
            Geometry::Quadratic { scale } => x.mapv(|v| scale * v),
            Geometry::NegEntropy => x.mapv(|v| 1.0 + v.ln()),
            Geometry::BinaryEntropyAvg { m, scale } => {
                let mf = m as f64;
                x.mapv(|v| scale * ((mf * v).ln() - (-mf * v).ln_1p()))
            }
        })
    }

    /// `D_φ(x, x̄)`, evaluated through log-ratios rather than differences
    /// of `φ`.
    ///
    /// For the negative entropy this is the generalized KL divergence
    /// `Σ [x ln(x/x̄) − x + x̄]`, which is the usual KL divergence when both
    /// points lie on the simplex.
    pub fn divergence(&self, x: ArrayView1<f64>, x_bar: ArrayView1<f64>) -> Result<f64> {
        check_dim("divergence arguments", x.len(), x_bar.len())?;
        self.check_domain(x, false)?;
        self.check_domain(x_bar, true)?;
        Ok(match *self {
            Geometry::Quadratic { scale } => {
                0.5 * scale * Zip::from(x).and(x_bar).fold(0.0, |s, &a, &b| s + (a - b) * (a - b))
            }
            Geometry::NegEntropy => {
                Zip::from(x).and(x_bar).fold(0.0, |s, &a, &b| s + xlog_ratio(a, b) - a + b).max(0.0)
            }
            Geometry::BinaryEntropyAvg { m, scale } => {
                let mf = m as f64;
                let s = Zip::from(x).and(x_bar).fold(0.0, |s, &a, &b| {
                    let (t, tb) = (mf * a, mf * b);
                    s + xlog_ratio(t, tb) + xlog_ratio(1.0 - t, 1.0 - tb)
                });
                (scale * s / mf).max(0.0)
            }
        })
    }

    /// Residual of the three-point identity
    /// `D(x,x′) = D(x̂,x′) + D(x,x̂) + ⟨∇φ(x′) − ∇φ(x̂), x̂ − x⟩`.
    pub fn three_point_check(
        &self,
        x: ArrayView1<f64>,
        x_hat: ArrayView1<f64>,
        x_prime: ArrayView1<f64>,
    ) -> Result<f64> {
        let lhs = self.divergence(x, x_prime)?;
        let d1 = self.divergence(x_hat, x_prime)?;
        let d2 = self.divergence(x, x_hat)?;
        let g = self.gradient(x_prime)? - self.gradient(x_hat)?;
        let diff = &x_hat - &x;
        Ok((lhs - d1 - d2 - g.dot(&diff)).abs())
    }

    /// The unscaled lift `ln(m y / (1 − m y))` of a point in the open box.
    pub fn logit_lift(&self, y: ArrayView1<f64>) -> Result<Array1<f64>> {
        match *self {
            Geometry::BinaryEntropyAvg { m, .. } => {
                self.check_domain(y, true)?;
                let mf = m as f64;
                Ok(y.mapv(|v| crate::numeric::logit(mf * v)))
            }
            _ => Err(Error::Config("logit lift needs the binary entropy geometry".into())),
        }
    }
}
