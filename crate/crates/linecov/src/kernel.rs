//! Squared-exponential kernel algebra: the pointwise kernel, the single
//! line integral with its degenerate branch, and the six-coefficient
//! expansion of the double-integral exponent including the swap rule.

use alloc::vec::Vec;

use crate::math;
use crate::specfun::erf;
use crate::{Error, Result, DEFAULT_EPS_W};

const SQRT_PI_OVER_2: f64 = 1.2533141373155002512078826424055226; // sqrt(pi/2)

/// Symmetric positive-definite scaling matrix of the squared-exponential
/// kernel, in inverse-squared-length units.
///
/// Symmetry is required exactly as stored and positive definiteness is
/// checked once at construction through a Cholesky factorization; all
/// quadratic forms afterwards are computed from the entries directly.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingMatrix {
    dim: usize,
    entries: Vec<f64>, // row-major
    chol: Vec<f64>,    // lower-triangular factor, row-major
}

impl ScalingMatrix {
    /// Build from row-major entries of an `m x m` matrix.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite"));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let chol = cholesky(dim, &entries).ok_or(Error::NotPositiveDefinite {
            jitter_tried: &[0.0],
        })?;
        Ok(ScalingMatrix { dim, entries, chol })
    }

    /// The identity scaling in `m` dimensions.
    pub fn identity(dim: usize) -> Self {
        let mut entries = alloc::vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        ScalingMatrix::new(dim, entries).expect("identity is SPD")
    }

    /// Diagonal scaling with the given strictly positive entries.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut entries = alloc::vec![0.0; dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            entries[i * dim + i] = v;
        }
        ScalingMatrix::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Cached lower-triangular Cholesky factor from construction.
    pub fn cholesky_factor(&self) -> &[f64] {
        &self.chol
    }

    /// Quadratic form `x^T V y`.
    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let mut acc = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.entries[i * self.dim + j] * y[j];
            }
            acc += x[i] * row;
        }
        Ok(acc)
    }

    /// Euclidean norm of `V w`.
    pub fn vnorm(&self, w: &[f64]) -> Result<f64> {
        self.check_dim(w.len())?;
        let mut acc = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.entries[i * self.dim + j] * w[j];
            }
            acc += row * row;
        }
        Ok(math::sqrt(acc))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }
}

fn cholesky(dim: usize, entries: &[f64]) -> Option<Vec<f64>> {
    let mut l = alloc::vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = entries[i * dim + j];
            for k in 0..j {
                sum -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * dim + i] = math::sqrt(sum);
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    Some(l)
}

/// A straight measurement segment: start point `p` and span `w`
/// (direction times length), parameterized as `p + w t` for `t` in `[0, 1]`.
///
/// A zero span is legal and denotes a degenerate point measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    start: Vec<f64>,
    span: Vec<f64>,
}

impl Line {
    pub fn new(start: Vec<f64>, span: Vec<f64>) -> Result<Self> {
        if start.len() != span.len() {
            return Err(Error::DimensionMismatch {
                expected: start.len(),
                got: span.len(),
            });
        }
        if start.is_empty() {
            return Err(Error::InvalidArgument("line dimension must be positive"));
        }
        if start.iter().chain(span.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("line entries must be finite"));
        }
        Ok(Line { start, span })
    }

    pub fn dim(&self) -> usize {
        self.start.len()
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn span(&self) -> &[f64] {
        &self.span
    }

    /// Euclidean length of the span.
    pub fn length(&self) -> f64 {
        math::sqrt(self.span.iter().map(|v| v * v).sum())
    }
}

/// The six scalars of the expanded double-integral exponent
/// `a - b s + c t - d s t + e t^2 + f s^2`, plus a flag recording whether
/// the two line roles were exchanged by the swap rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub swapped: bool,
}

impl QuadCoeffs {
    /// Check the quadratic-form invariants: `a`, `e`, `f` nonnegative and
    /// the three Cauchy-Schwarz bounds in the `V` inner product, each with
    /// tolerance `1e-12 * (1 + bound)`.
    pub fn validate(&self) -> Result<()> {
        let cs = |lhs: f64, rhs: f64| lhs <= rhs + 1e-12 * (1.0 + rhs);
        if self.a < 0.0 || self.e < 0.0 || self.f < 0.0 {
            return Err(Error::InvalidArgument("a, e, f must be nonnegative"));
        }
        if !cs(self.d * self.d, 4.0 * self.e * self.f)
            || !cs(self.b * self.b, 4.0 * self.a * self.f)
            || !cs(self.c * self.c, 4.0 * self.a * self.e)
        {
            return Err(Error::InvalidArgument(
                "coefficients violate Cauchy-Schwarz in the V inner product",
            ));
        }
        Ok(())
    }

    /// The exponent quadratic `a - b s + c t - d s t + e t^2 + f s^2`.
    pub fn exponent_quadratic(&self, t: f64, s: f64) -> f64 {
        self.a - self.b * s + self.c * t - self.d * s * t + self.e * t * t + self.f * s * s
    }
}

/// Pointwise squared-exponential kernel
/// `k(z, z') = exp(-0.5 (z - z')^T V (z - z'))`, in `(0, 1]`.
pub fn se_kernel(z: &[f64], z_prime: &[f64], v: &ScalingMatrix) -> Result<f64> {
    if z.len() != z_prime.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: z_prime.len(),
        });
    }
    let diff: Vec<f64> = z.iter().zip(z_prime).map(|(a, b)| a - b).collect();
    let q = v.quad_form(&diff, &diff)?;
    Ok(math::exp(-0.5 * q))
}

/// Covariance between a line measurement and the function value at
/// `z_star`: `||w|| * integral over [0,1] of exp(-0.5 (w t + v)^T V (w t + v)) dt`
/// with `v = p - z_star`.
///
/// Evaluated in closed form through the error function. Spans with
/// `||V w||` below the shared degeneracy threshold take the point-measurement
/// branch `||w|| exp(-0.5 v^T V v)`, which is exactly zero for a zero span.
pub fn single_line_integral(line: &Line, z_star: &[f64], v: &ScalingMatrix) -> Result<f64> {
    if z_star.len() != line.dim() {
        return Err(Error::DimensionMismatch {
            expected: line.dim(),
            got: z_star.len(),
        });
    }
    let w = line.span();
    let offset: Vec<f64> = line
        .start()
        .iter()
        .zip(z_star)
        .map(|(p, z)| p - z)
        .collect();

    let c3 = v.quad_form(&offset, &offset)?;
    if v.vnorm(w)? < DEFAULT_EPS_W {
        return Ok(line.length() * math::exp(-0.5 * c3));
    }
    let c1 = v.quad_form(w, w)?;
    let c2 = 2.0 * v.quad_form(w, &offset)?;

    // the exponent is formed as one expression before exponentiation; it is
    // minus the t-minimum of the integrand's quadratic, hence never positive
    let expo = math::exp(c2 * c2 / (8.0 * c1) - 0.5 * c3);
    let inv = 0.5 / math::sqrt(2.0 * c1);
    let band = erf((2.0 * c1 + c2) * inv) - erf(c2 * inv);
    Ok(line.length() * SQRT_PI_OVER_2 / math::sqrt(c1) * expo * band)
}

/// Expand the double-integral exponent for the pair `(u, w_i, w_j)` with
/// `u = p_i - p_j`, applying the swap rule: when `||V w_i|| < ||V w_j||`
/// the line roles are exchanged (which maps `u` to `-u`), so that the erf
/// solution integrates the analytically longer direction.
pub fn quad_coeffs(u: &[f64], w_i: &[f64], w_j: &[f64], v: &ScalingMatrix) -> Result<QuadCoeffs> {
    let swap = v.vnorm(w_i)? < v.vnorm(w_j)?;
    let a = v.quad_form(u, u)?;
    if swap {
        Ok(QuadCoeffs {
            a,
            b: -2.0 * v.quad_form(u, w_i)?,
            c: -2.0 * v.quad_form(u, w_j)?,
            d: 2.0 * v.quad_form(w_i, w_j)?,
            e: v.quad_form(w_j, w_j)?,
            f: v.quad_form(w_i, w_i)?,
            swapped: true,
        })
    } else {
        Ok(QuadCoeffs {
            a,
            b: 2.0 * v.quad_form(u, w_j)?,
            c: 2.0 * v.quad_form(u, w_i)?,
            d: 2.0 * v.quad_form(w_j, w_i)?,
            e: v.quad_form(w_i, w_i)?,
            f: v.quad_form(w_j, w_j)?,
            swapped: false,
        })
    }
}
