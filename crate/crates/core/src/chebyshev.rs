//! Orthonormal Chebyshev polynomials of the second kind with respect to the
//! weight `phi(x) = sqrt(1 - x^2)`, their zeros, Christoffel numbers and the
//! associated Gauss-Chebyshev rule.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_SQRT_PI, PI};

use crate::{Error, Result};

/// `sqrt(2 / pi)`, the value of the constant polynomial `p_0`.
pub const SQRT_2_OVER_PI: f64 = FRAC_2_SQRT_PI * FRAC_1_SQRT_2;

/// Arguments this far outside `[-1, 1]` are clamped instead of rejected.
pub const DOMAIN_SLACK: f64 = 1e-14;

/// Width of the endpoint band in which the angle is recovered from `1 - |x|`.
pub const ENDPOINT_BAND: f64 = 1e-8;

/// Angle `t = arccos|x|` together with the sign needed for the reflection
/// `p_j(-x) = (-1)^j p_j(x)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Angle {
    pub t: f64,
    pub sin_t: f64,
    pub negative: bool,
}

impl Angle {
    pub(crate) fn of(x: f64) -> Result<Self> {
        if !x.is_finite() || x.abs() > 1.0 + DOMAIN_SLACK {
            return Err(Error::Domain(x));
        }
        let ax = x.abs().min(1.0);
        let eps = 1.0 - ax;
        let t = if eps < ENDPOINT_BAND {
            // half-angle form keeps full relative accuracy in t as eps -> 0
            2.0 * (0.5 * eps).sqrt().asin()
        } else {
            ax.acos()
        };
        Ok(Angle {
            t,
            sin_t: t.sin(),
            negative: x < 0.0,
        })
    }

    /// `p_j` at this angle, including the endpoint limit.
    pub(crate) fn p(&self, j: usize) -> f64 {
        let k = (j + 1) as f64;
        let ratio = if self.sin_t == 0.0 {
            k
        } else {
            (k * self.t).sin() / self.sin_t
        };
        let v = SQRT_2_OVER_PI * ratio;
        if self.negative && j % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// Evaluates the orthonormal second-kind Chebyshev polynomial
/// `p_j(x) = sqrt(2/pi) sin((j+1)t) / sin t`, `t = arccos x`.
///
/// At `x = +-1` the limit `(+-1)^j sqrt(2/pi) (j+1)` is returned. Inside the
/// band `1 - |x| < 1e-8` the angle is computed from `1 - |x|` so the ratio
/// stays accurate for large `j`.
pub fn eval_p(j: usize, x: f64) -> Result<f64> {
    Ok(Angle::of(x)?.p(j))
}

/// Values `p_0(x), ..., p_{count-1}(x)`.
pub fn p_values(x: f64, count: usize) -> Result<Vec<f64>> {
    let a = Angle::of(x)?;
    Ok((0..count).map(|j| a.p(j)).collect())
}

/// Zeros of `p_n` with their Christoffel numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    n: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    sin_angles: Vec<f64>,
}

/// Builds the `n`-point grid: `x_k = cos(k pi / (n+1))`,
/// `lambda_k = pi/(n+1) sin^2(k pi / (n+1))`, `k = 1..n`.
pub fn grid(n: usize) -> Result<ChebyshevGrid> {
    ChebyshevGrid::new(n)
}

impl ChebyshevGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("grid size must be positive".into()));
        }
        let h = PI / (2 * (n + 1)) as f64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut sin_angles = Vec::with_capacity(n);
        for k in 1..=n {
            // cos(k pi/(n+1)) written as sin((n+1-2k) pi / (2(n+1))) is exactly
            // antisymmetric in k, so the grid is symmetric to the last bit.
            let r = (n + 1) as f64 - 2.0 * k as f64;
            let s = (r * h).cos();
            nodes.push((r * h).sin());
            sin_angles.push(s);
            weights.push(PI / (n + 1) as f64 * s * s);
        }
        Ok(ChebyshevGrid {
            n,
            nodes,
            weights,
            sin_angles,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nodes in decreasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Christoffel numbers, aligned with [`nodes`](Self::nodes).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `p_j(x_k)` for the 1-based node index `k`, evaluated from the reduced
    /// angle `((j+1) k mod 2(n+1)) pi / (n+1)` so that aliasing identities such
    /// as `p_{2n-j}(x_k) = -p_j(x_k)` hold to rounding.
    pub fn p_at_node(&self, j: usize, k: usize) -> f64 {
        debug_assert!((1..=self.n).contains(&k));
        let period = 2 * (self.n + 1);
        let r = ((j + 1) * k) % period;
        let s = (r as f64 * PI / (self.n + 1) as f64).sin();
        SQRT_2_OVER_PI * s / self.sin_angles[k - 1]
    }

    /// Row-major `count x n` matrix with entries `lambda_k p_j(x_k)`.
    pub fn weighted_p_matrix(&self, count: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; count * n];
        for j in 0..count {
            let row = &mut out[j * n..(j + 1) * n];
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = self.weights[k] * self.p_at_node(j, k + 1);
            }
        }
        out
    }

    fn check_len(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: samples.len(),
            });
        }
        Ok(())
    }

    /// Samples `f(x_k)` of a function at the nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// Gauss-Chebyshev rule `sum_k lambda_k f(x_k)`, approximating
/// `int_{-1}^{1} f(x) phi(x) dx` (exact for degree `<= 2n-1`).
pub fn quad(samples: &[f64], grid: &ChebyshevGrid) -> Result<f64> {
    grid.check_len(samples)?;
    Ok(samples.iter().zip(grid.weights()).map(|(f, w)| f * w).sum())
}

/// Discrete Fourier-Chebyshev coefficients
/// `c_{n,j}(f) = sum_k lambda_k p_j(x_k) f(x_k)`, `j = 0..n-1`.
pub fn discrete_coeffs(samples: &[f64], grid: &ChebyshevGrid) -> Result<Vec<f64>> {
    grid.check_len(samples)?;
    let n = grid.n();
    let lf: Vec<f64> = samples
        .iter()
        .zip(grid.weights())
        .map(|(f, w)| f * w)
        .collect();
    Ok((0..n)
        .map(|j| {
            lf.iter()
                .enumerate()
                .map(|(k, v)| v * grid.p_at_node(j, k + 1))
                .sum()
        })
        .collect())
}
