//! Gaussian-process regression on line-integral observations: covariance
//! assembly from line datasets and posterior prediction at test inputs.

use alloc::vec::Vec;

use crate::double_integral::{evaluate, DegeneracyPolicy, MethodChoice};
use crate::kernel::{single_line_integral, Line, ScalingMatrix};
use crate::math;
use crate::{Error, Result};

/// Jitter multipliers (relative to the mean diagonal) tried in order when
/// factorizing a numerically near-PSD covariance matrix.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

/// A set of line-integral observations with homoscedastic Gaussian noise.
#[derive(Debug, Clone)]
pub struct LineDataset {
    lines: Vec<Line>,
    observations: Vec<f64>,
    noise_std: f64,
}

impl LineDataset {
    pub fn new(lines: Vec<Line>, observations: Vec<f64>, noise_std: f64) -> Result<Self> {
        if lines.len() != observations.len() {
            return Err(Error::DimensionMismatch {
                expected: lines.len(),
                got: observations.len(),
            });
        }
        if lines.is_empty() {
            return Err(Error::InvalidArgument("dataset must contain a line"));
        }
        if !noise_std.is_finite() || noise_std < 0.0 {
            return Err(Error::InvalidArgument("noise_std must be finite and >= 0"));
        }
        let dim = lines[0].dim();
        if lines.iter().any(|l| l.dim() != dim) {
            return Err(Error::InvalidArgument("all lines must share one dimension"));
        }
        if observations.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidArgument("observations must be finite"));
        }
        Ok(LineDataset {
            lines,
            observations,
            noise_std,
        })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lines[0].dim()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }
}

/// Dense row-major matrix, just large enough for covariance plumbing.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// GP posterior at a collection of test inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// The `n x n` measurement covariance: entry `(i, j)` is the double line
/// integral of lines `i` and `j` under the chosen method.
///
/// Only the upper triangle is computed; the lower is mirrored, so the
/// output is exactly symmetric. Diagonal entries exercise the exactly
/// colinear case. Evaluation failures are annotated with their position.
pub fn build_covariance(
    data: &LineDataset,
    v: &ScalingMatrix,
    method: MethodChoice,
    policy: &DegeneracyPolicy,
) -> Result<Matrix> {
    let n = data.len();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let value =
                evaluate(&data.lines[i], &data.lines[j], v, method, policy).map_err(|e| {
                    Error::CovarianceEntry {
                        row: i,
                        col: j,
                        source: alloc::boxed::Box::new(e),
                    }
                })?;
            k.set(i, j, value);
            k.set(j, i, value);
        }
    }
    Ok(k)
}

/// The `n x n_star` cross covariance between line measurements and function
/// values at the test points, one single line integral per entry.
pub fn cross_covariance(
    data: &LineDataset,
    test_points: &[Vec<f64>],
    v: &ScalingMatrix,
) -> Result<Matrix> {
    let n = data.len();
    let mut k = Matrix::zeros(n, test_points.len());
    for (j, z) in test_points.iter().enumerate() {
        for i in 0..n {
            k.set(i, j, single_line_integral(&data.lines[i], z, v)?);
        }
    }
    Ok(k)
}

/// GP posterior mean and variance at the test points:
/// `mean = K_*^T (K + sigma_n^2 I)^{-1} y` and
/// `var = k(z_*, z_*) - K_*^T (K + sigma_n^2 I)^{-1} K_*`,
/// through a Cholesky factorization with the jitter ladder. The prior
/// variance of the squared-exponential kernel is 1.
pub fn gp_predict(
    data: &LineDataset,
    test_points: &[Vec<f64>],
    v: &ScalingMatrix,
    method: MethodChoice,
    policy: &DegeneracyPolicy,
) -> Result<Posterior> {
    let n = data.len();
    let k = build_covariance(data, v, method, policy)?;
    let k_star = cross_covariance(data, test_points, v)?;

    let noise = data.noise_std * data.noise_std;
    let mut a = k;
    for i in 0..n {
        a.set(i, i, a.get(i, i) + noise);
    }
    let chol = cholesky_with_jitter(&a)?;

    let alpha = chol_solve(&chol, data.observations());
    let mut mean = Vec::with_capacity(test_points.len());
    let mut variance = Vec::with_capacity(test_points.len());
    for j in 0..test_points.len() {
        let col: Vec<f64> = (0..n).map(|i| k_star.get(i, j)).collect();
        mean.push(col.iter().zip(&alpha).map(|(a, b)| a * b).sum());
        let w = chol_forward(&chol, &col);
        let reduction: f64 = w.iter().map(|x| x * x).sum();
        let var = 1.0 - reduction;
        if var < -1e-10 {
            return Err(Error::InvalidArgument(
                "posterior variance fell below the -1e-10 floor",
            ));
        }
        variance.push(f64::max(var, 0.0));
    }
    Ok(Posterior { mean, variance })
}

/// Lower Cholesky factor of `a` after adding the first jitter rung that
/// makes the factorization succeed.
fn cholesky_with_jitter(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let mean_diag = (0..n).map(|i| a.get(i, i)).sum::<f64>() / n as f64;
    for &mult in JITTER_LADDER.iter() {
        let jitter = mult * mean_diag;
        if let Some(l) = try_cholesky(a, jitter) {
            return Ok(l);
        }
    }
    Err(Error::NotPositiveDefinite {
        jitter_tried: &JITTER_LADDER,
    })
}

fn try_cholesky(a: &Matrix, jitter: f64) -> Option<Matrix> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j) + if i == j { jitter } else { 0.0 };
            for p in 0..j {
                sum -= l.get(i, p) * l.get(j, p);
            }
            if i == j {
                if sum.is_nan() || sum <= 0.0 {
                    return None;
                }
                l.set(i, i, math::sqrt(sum));
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Some(l)
}

/// Solve `L w = b`.
fn chol_forward(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut w = alloc::vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for j in 0..i {
            sum -= l.get(i, j) * w[j];
        }
        w[i] = sum / l.get(i, i);
    }
    w
}

/// Solve `L L^T x = b`.
fn chol_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = chol_forward(l, b);
    for i in (0..n).rev() {
        let mut sum = x[i];
        for j in (i + 1)..n {
            sum -= l.get(j, i) * x[j];
        }
        x[i] = sum / l.get(i, i);
    }
    x
}
