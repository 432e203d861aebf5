//! Linear operators and the operator norms the step sizes depend on.
//!
//! `‖A‖_{p,q}` denotes `sup ‖Ax‖_q / ‖x‖_p`. The cheap members of the family
//! are closed forms over rows, columns or entries; `‖A‖_{2,2}` needs power
//! iteration.

use std::io::{Read, Write};

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{check_dim, Error, Result};

pub const DEFAULT_POWER_TOL: f64 = 1e-10;
pub const DEFAULT_POWER_MAX_ITERS: usize = 100_000;

pub trait LinearOperator: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `A x` without dimension checks.
    fn apply_unchecked(&self, x: ArrayView1<f64>) -> Array1<f64>;
    /// `Aᵀ y` without dimension checks.
    fn adjoint_unchecked(&self, y: ArrayView1<f64>) -> Array1<f64>;

    /// Maximum ℓ2 norm of a column, `‖A‖_{1,2}`.
    fn norm_1_2(&self) -> f64;
    /// Largest entry magnitude, `‖A‖_{1,∞}`.
    fn norm_1_inf(&self) -> f64;
    /// Maximum ℓ2 norm of a row, `‖A‖_{2,∞}`.
    fn norm_2_inf(&self) -> f64;

    fn apply(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        check_dim("operator input", self.cols(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    fn adjoint_apply(&self, y: ArrayView1<f64>) -> Result<Array1<f64>> {
        check_dim("adjoint input", self.rows(), y.len())?;
        Ok(self.adjoint_unchecked(y))
    }

    /// Largest singular value by power iteration on `AᵀA`.
    fn norm_2_2(&self, tol: f64, max_iters: usize) -> Result<f64>
    where
        Self: Sized,
    {
        power_iteration(self, tol, max_iters)
    }
}

/// Power iteration on `AᵀA` from the normalized all-ones vector.
///
/// Stops once successive Rayleigh quotients differ by less than `tol`
/// relative to the current one. Returns `σ_max`, or zero for a zero matrix.
pub fn power_iteration<A: LinearOperator + ?Sized>(op: &A, tol: f64, max_iters: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("power iteration tolerance must be positive, got {tol}")));
    }
    let n = op.cols();
    if n == 0 || op.rows() == 0 {
        return Err(Error::Config("empty operator".into()));
    }
    let mut v = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut w = op.adjoint_unchecked(op.apply_unchecked(v.view()).view());
    if w.iter().all(|&t| t == 0.0) {
        // all-ones may lie in the kernel; restart on the heaviest column
        if op.norm_1_2() == 0.0 {
            return Ok(0.0);
        }
        let j = (0..n)
            .map(|j| {
                let mut e = Array1::zeros(n);
                e[j] = 1.0;
                (j, crate::numeric::norm2(op.apply_unchecked(e.view()).view()))
            })
            .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best })
            .0;
        v.fill(0.0);
        v[j] = 1.0;
        w = op.adjoint_unchecked(op.apply_unchecked(v.view()).view());
    }
    let mut rho = v.dot(&w);
    for _ in 0..max_iters {
        let nw = crate::numeric::norm2(w.view());
        if nw == 0.0 {
            return Ok(0.0);
        }
        v = w / nw;
        w = op.adjoint_unchecked(op.apply_unchecked(v.view()).view());
        let next = v.dot(&w);
        if (next - rho).abs() < tol * next {
            return Ok(next.max(0.0).sqrt());
        }
        rho = next;
    }
    Err(Error::NotConverged { what: "power iteration", iterations: max_iters, last_estimate: rho.max(0.0).sqrt() })
}

/// `Mᵀy`, accumulated row by row so a row-major `M` is read contiguously.
pub fn transpose_dot(m: &Array2<f64>, y: ArrayView1<f64>) -> Array1<f64> {
    let mut out = Array1::zeros(m.ncols());
    for (row, &yi) in m.rows().into_iter().zip(y) {
        if yi != 0.0 {
            out.scaled_add(yi, &row);
        }
    }
    out
}

/// A dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub matrix: Array2<f64>,
}

impl Dense {
    pub fn new(matrix: Array2<f64>) -> Self {
        Dense { matrix }
    }
}

fn max_row_norm(m: &Array2<f64>) -> f64 {
    m.axis_iter(Axis(0)).map(|r| r.dot(&r)).fold(0.0, f64::max).sqrt()
}

fn max_col_norm(m: &Array2<f64>) -> f64 {
    let mut sq = Array1::<f64>::zeros(m.ncols());
    for r in m.axis_iter(Axis(0)) {
        sq.zip_mut_with(&r, |s, &v| *s += v * v);
    }
    sq.fold(0.0, |a: f64, &b| a.max(b)).sqrt()
}

fn max_abs(m: &Array2<f64>) -> f64 {
    m.fold(0.0, |a, &b| a.max(b.abs()))
}

impl LinearOperator for Dense {
    fn rows(&self) -> usize {
        self.matrix.nrows()
    }
    fn cols(&self) -> usize {
        self.matrix.ncols()
    }
    fn apply_unchecked(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.matrix.dot(&x)
    }
    fn adjoint_unchecked(&self, y: ArrayView1<f64>) -> Array1<f64> {
        transpose_dot(&self.matrix, y)
    }
    fn norm_1_2(&self) -> f64 {
        max_col_norm(&self.matrix)
    }
    fn norm_1_inf(&self) -> f64 {
        max_abs(&self.matrix)
    }
    fn norm_2_inf(&self) -> f64 {
        max_row_norm(&self.matrix)
    }
}

/// `A = λ (B | −B)`, applied without forming the concatenation.
///
/// Inputs are split as `x = (x₊, x₋)` so that `A x = λ B (x₊ − x₋)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledConcat {
    pub base: Array2<f64>,
    pub scale: f64,
}

impl ScaledConcat {
    pub fn new(base: Array2<f64>, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("scale must be positive, got {scale}")));
        }
        Ok(ScaledConcat { base, scale })
    }

    pub fn materialize(&self) -> Array2<f64> {
        let d = self.base.ncols();
        let mut out = Array2::zeros((self.base.nrows(), 2 * d));
        out.slice_mut(ndarray::s![.., ..d]).assign(&(&self.base * self.scale));
        out.slice_mut(ndarray::s![.., d..]).assign(&(&self.base * -self.scale));
        out
    }
}

impl LinearOperator for ScaledConcat {
    fn rows(&self) -> usize {
        self.base.nrows()
    }
    fn cols(&self) -> usize {
        2 * self.base.ncols()
    }
    fn apply_unchecked(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let d = self.base.ncols();
        let diff = &x.slice(ndarray::s![..d]) - &x.slice(ndarray::s![d..]);
        self.base.dot(&diff) * self.scale
    }
    fn adjoint_unchecked(&self, y: ArrayView1<f64>) -> Array1<f64> {
        let d = self.base.ncols();
        let half = transpose_dot(&self.base, y) * self.scale;
        let mut out = Array1::zeros(2 * d);
        out.slice_mut(ndarray::s![..d]).assign(&half);
        out.slice_mut(ndarray::s![d..]).assign(&-half);
        out
    }
    fn norm_1_2(&self) -> f64 {
        self.scale * max_col_norm(&self.base)
    }
    fn norm_1_inf(&self) -> f64 {
        self.scale * max_abs(&self.base)
    }
    fn norm_2_inf(&self) -> f64 {
        self.scale * std::f64::consts::SQRT_2 * max_row_norm(&self.base)
    }
}

/// Reads a matrix stored one row per line, comma separated, no header.
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<Array2<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut data = Vec::new();
    let mut ncols = None;
    let mut nrows = 0;
    for rec in rdr.records() {
        let rec = rec?;
        match ncols {
            None => ncols = Some(rec.len()),
            Some(c) => check_dim("matrix row length", c, rec.len())?,
        }
        for field in rec.iter() {
            data.push(field.parse::<f64>().map_err(|e| Error::Parse(format!("{field:?}: {e}")))?);
        }
        nrows += 1;
    }
    Array2::from_shape_vec((nrows, ncols.unwrap_or(0)), data).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes a matrix in the format accepted by [`read_matrix_csv`]. Values are
/// printed with round-trip precision.
pub fn write_matrix_csv<W: Write>(writer: W, m: &Array2<f64>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in m.axis_iter(Axis(0)) {
        wtr.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    wtr.flush()?;
    Ok(())
}
