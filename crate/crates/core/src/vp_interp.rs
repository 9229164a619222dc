//! The VP quasi-projection `V_n^m` acting on node samples.

use rayon::prelude::*;

use crate::chebyshev::{discrete_coeffs, Angle, ChebyshevGrid};
use crate::vp_basis::{eval_phi, q_at, q_tilde_at, VpParams};
use crate::{Error, Result};

/// Default number of points of the uniform probe mesh.
pub const DEFAULT_PROBE_MESH: usize = 2001;

/// Which orthogonal basis a coefficient vector refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `q_j`, spanning the VP space (range of `V_n^m`).
    Q,
    /// `q~_j = D^{-1} q_j`, spanning the solution space.
    QTilde,
}

impl Basis {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Basis::Q => "q",
            Basis::QTilde => "q-tilde",
        }
    }
}

/// A polynomial given by `n` coefficients over the `q` or `q~` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct VpFunction {
    params: VpParams,
    basis: Basis,
    coeffs: Vec<f64>,
}

impl VpFunction {
    pub fn new(params: VpParams, basis: Basis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != params.n() {
            return Err(Error::LengthMismatch {
                expected: params.n(),
                got: coeffs.len(),
            });
        }
        Ok(VpFunction {
            params,
            basis,
            coeffs,
        })
    }

    pub fn zero(params: VpParams, basis: Basis) -> Self {
        VpFunction {
            params,
            basis,
            coeffs: vec![0.0; params.n()],
        }
    }

    pub fn params(&self) -> VpParams {
        self.params
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Same coefficients, different basis tag.
    pub(crate) fn retag(self, basis: Basis) -> Self {
        VpFunction { basis, ..self }
    }

    /// `sum_j coeffs[j] * b_j(x)` for the tagged basis `b`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let a = Angle::of(x)?;
        let p = self.params;
        Ok(match self.basis {
            Basis::Q => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * q_at(p, j, &a))
                .sum(),
            Basis::QTilde => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * q_tilde_at(p, j, &a))
                .sum(),
        })
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// See [`VpFunction::eval`].
pub fn eval_vp(f: &VpFunction, x: f64) -> Result<f64> {
    f.eval(x)
}

/// `V_n^m f` from the samples `f(x_k)` on the `n`-point grid, expanded in
/// the `q` basis with coefficients `c_{n,j}(f)`.
pub fn vp_from_samples(params: VpParams, samples: &[f64]) -> Result<VpFunction> {
    let grid = ChebyshevGrid::new(params.n())?;
    vp_from_samples_on(params, &grid, samples)
}

pub(crate) fn vp_from_samples_on(
    params: VpParams,
    grid: &ChebyshevGrid,
    samples: &[f64],
) -> Result<VpFunction> {
    let coeffs = discrete_coeffs(samples, grid)?;
    VpFunction::new(params, Basis::Q, coeffs)
}

/// `V_n^m f(x) = sum_k f(x_k) Phi_{n,k}^m(x)`, the kernel form of the
/// quasi-projection. Slower than the `q` expansion; kept as a cross-check.
pub fn vp_kernel_eval(params: VpParams, samples: &[f64], x: f64) -> Result<f64> {
    if samples.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            got: samples.len(),
        });
    }
    samples
        .iter()
        .enumerate()
        .map(|(k, f)| Ok(f * eval_phi(params, k + 1, x)?))
        .sum()
}

/// `size` equispaced points from -1 to 1 inclusive.
pub fn uniform_mesh(size: usize) -> Vec<f64> {
    match size {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let d = (size - 1) as f64;
            (0..size).map(|i| (2.0 * i as f64 - d) / d).collect()
        }
    }
}

/// Weighted Lebesgue function of `V_n^m` maximised over `mesh`:
/// `max_x phi(x) sum_k |Phi_{n,k}^m(x)| / phi(x_k)`.
pub fn lebesgue_probe(params: VpParams, mesh: &[f64]) -> Result<f64> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let grid = ChebyshevGrid::new(params.n())?;
    let inv_phi: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|x| 1.0 / (1.0 - x * x).sqrt())
        .collect();
    let values: Vec<f64> = mesh
        .par_iter()
        .map(|&x| -> Result<f64> {
            let phi = (1.0 - x * x).max(0.0).sqrt();
            let mut s = 0.0;
            for (k, w) in inv_phi.iter().enumerate() {
                s += eval_phi(params, k + 1, x)?.abs() * w;
            }
            Ok(phi * s)
        })
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}
