//! Spectral actions of the hypersingular operator `D` and the logarithmic
//! operator `K`, and assembly of the collocation matrices.
//!
//! With `f~ = sum_j f~_j q~_j` the projected equation reads
//! `(I + sigma V + A + B) f~ = g` where
//!
//! - `V = diag(w_j)` represents `V_n^m` from `q~` to `q` coefficients,
//! - `A` represents `K_n^m` and has nonzeros only at `|i - j| in {0, 2}`,
//! - `B = (1/pi) (P Lambda) H (P Lambda)^T Q` represents `H_n^m`.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::chebyshev::ChebyshevGrid;
use crate::matrix::{DenseMatrix, TwoBandMatrix};
use crate::vp_basis::{VpBasisTables, VpParams};
use crate::vp_interp::{Basis, VpFunction};
use crate::{Error, Result};

/// `K p_0` coefficient on `p_0`: `(2 log 2 + 1/2) / 4`.
pub const K_P0_DIAG: f64 = 0.25 * (2.0 * LN_2 + 0.5);

/// Image of `p_ell` under `K` as coefficients on `(p_{ell-2}, p_ell, p_{ell+2})`.
pub fn k_on_p(ell: usize) -> (f64, f64, f64) {
    if ell == 0 {
        return (0.0, K_P0_DIAG, -0.125);
    }
    let l = ell as f64;
    (
        -0.25 / l,
        0.25 * (1.0 / l + 1.0 / (l + 2.0)),
        -0.25 / (l + 2.0),
    )
}

/// Recurrence coefficients of `K q~_ell` at the nodes,
/// `K q~_ell(x_k) = alpha_ell p_{ell-2}(x_k) + beta_ell p_ell(x_k) + gamma_ell p_{ell+2}(x_k)`,
/// plus the diagonal `delta_j = 1 + sigma w_j + beta_j` of the `H = 0` system.
///
/// All vectors have length `n`; entries outside the defined ranges are
/// stored as explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCoeffs {
    params: VpParams,
    sigma: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    w: Vec<f64>,
    delta: Vec<f64>,
}

impl OperatorCoeffs {
    pub fn params(&self) -> VpParams {
        self.params
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
    pub fn w(&self) -> &[f64] {
        &self.w
    }
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }
}

fn alpha(n: usize, m: usize, ell: usize) -> f64 {
    let (nf, mf, l) = (n as f64, m as f64, ell as f64);
    if ell < 2 || ell >= n {
        0.0
    } else if ell <= n - m {
        -1.0 / (4.0 * l * (l + 1.0))
    } else {
        -((nf + mf - l) / (l * (l + 1.0))
            + (l - nf + mf) / ((2.0 * nf - l + 1.0) * (2.0 * nf - l + 2.0)))
            / (8.0 * mf)
    }
}

fn beta(n: usize, m: usize, ell: usize) -> f64 {
    let (nf, mf, l) = (n as f64, m as f64, ell as f64);
    if ell == 0 {
        K_P0_DIAG
    } else if ell == n - 1 {
        // p_{n+1}(x_k) = -p_{n-1}(x_k) folds the p_{ell+2} term back
        ((mf + 1.0) * (3.0 * nf - 1.0) / (nf * (nf * nf - 1.0))
            + (mf - 1.0) * (3.0 * nf + 7.0) / ((nf + 1.0) * (nf + 2.0) * (nf + 3.0)))
            / (8.0 * mf)
    } else if ell <= n - m {
        1.0 / (2.0 * l * (l + 2.0))
    } else {
        ((nf + mf - l) / (l * (l + 2.0)) + (l - nf + mf) / ((2.0 * nf - l) * (2.0 * nf - l + 2.0)))
            / (4.0 * mf)
    }
}

fn gamma(n: usize, m: usize, ell: usize) -> f64 {
    let (nf, mf, l) = (n as f64, m as f64, ell as f64);
    if ell + 3 > n {
        // p_{ell+2} vanishes at the nodes (ell = n-2) or was folded (ell = n-1)
        0.0
    } else if ell == 0 {
        -0.125
    } else if ell <= n - m {
        -1.0 / (4.0 * (l + 1.0) * (l + 2.0))
    } else {
        -((nf + mf - l) / ((l + 1.0) * (l + 2.0))
            + (l - nf + mf) / ((2.0 * nf - l + 1.0) * (2.0 * nf - l)))
            / (8.0 * mf)
    }
}

/// Fills `alpha`, `beta`, `gamma` and `delta = 1 + sigma w + beta`.
pub fn operator_coeffs(params: VpParams, sigma: f64) -> OperatorCoeffs {
    let (n, m) = (params.n(), params.m());
    let tables = VpBasisTables::new(params);
    let alpha: Vec<f64> = (0..n).map(|l| alpha(n, m, l)).collect();
    let beta: Vec<f64> = (0..n).map(|l| beta(n, m, l)).collect();
    let gamma: Vec<f64> = (0..n).map(|l| gamma(n, m, l)).collect();
    let w = tables.w().to_vec();
    let delta = w
        .iter()
        .zip(&beta)
        .map(|(w, b)| 1.0 + sigma * w + b)
        .collect();
    OperatorCoeffs {
        params,
        sigma,
        alpha,
        beta,
        gamma,
        w,
        delta,
    }
}

/// The matrix of `K_n^m` from `q~` to `q` coefficients:
/// `A[j][j] = beta_j`, `A[j][j+2] = alpha_{j+2}`, `A[j][j-2] = gamma_{j-2}`.
pub fn assemble_a(coeffs: &OperatorCoeffs) -> TwoBandMatrix {
    let n = coeffs.params.n();
    let off = n.saturating_sub(2);
    let upper = (0..off).map(|j| coeffs.alpha[j + 2]).collect();
    let lower = coeffs.gamma[..off].to_vec();
    TwoBandMatrix::new(coeffs.beta.clone(), upper, lower).expect("band lengths are consistent")
}

/// `I + sigma V (+ A when `include_k`)`, the whole system matrix when `H = 0`.
pub fn assemble_banded_system(coeffs: &OperatorCoeffs, include_k: bool) -> TwoBandMatrix {
    let n = coeffs.params.n();
    if include_k {
        let mut a = assemble_a(coeffs);
        let shift: Vec<f64> = coeffs.w.iter().map(|w| 1.0 + coeffs.sigma * w).collect();
        a.add_diag(&shift);
        a
    } else {
        let diag = coeffs.w.iter().map(|w| 1.0 + coeffs.sigma * w).collect();
        let off = n.saturating_sub(2);
        TwoBandMatrix::new(diag, vec![0.0; off], vec![0.0; off]).expect("consistent lengths")
    }
}

/// The matrix of `H_n^m` from `q~` to `q` coefficients,
/// `B = (1/pi) (P Lambda) H (P Lambda)^T Q` with `P[i][j] = p_i(x_j)`,
/// `H[i][j] = h(x_j, x_i)` and `Q = diag(<q_j, q~_j>)`.
///
/// The kernel is called as `h(x, y)` with `x` the integration variable and
/// `y` the collocation point.
pub fn assemble_b<H>(grid: &ChebyshevGrid, tables: &VpBasisTables, h: &H) -> Result<DenseMatrix>
where
    H: Fn(f64, f64) -> f64 + Sync + ?Sized,
{
    let n = tables.params().n();
    if grid.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: grid.n(),
        });
    }
    let x = grid.nodes();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            x.iter()
                .enumerate()
                .map(|(j, &xj)| {
                    let v = h(xj, x[i]);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFinite {
                            index: i * n + j,
                            value: v,
                        })
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let kernel = DenseMatrix::from_row_major(n, n, rows.concat())?;
    let pl = DenseMatrix::from_row_major(n, n, grid.weighted_p_matrix(n))?;
    let mut b = pl.matmul(&kernel)?.matmul_transposed(&pl)?;
    let scale: Vec<f64> = tables.mixed().iter().map(|q| q / PI).collect();
    b.scale_columns(&scale);
    Ok(b)
}

/// `D` maps `q~_j` to `q_j`, so its action only retags the coefficients.
pub fn d_action(f: VpFunction) -> Result<VpFunction> {
    match f.basis() {
        Basis::QTilde => Ok(f.retag(Basis::Q)),
        Basis::Q => Err(Error::WrongBasis {
            expected: Basis::QTilde.name(),
        }),
    }
}

/// Matrices of the projected equation for one `(n, m, sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub a: Option<TwoBandMatrix>,
    pub b: Option<DenseMatrix>,
    pub v: Vec<f64>,
    pub sigma: f64,
}

impl SystemMatrices {
    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// `I + sigma V (+ A)` as a band matrix.
    pub fn banded_part(&self) -> TwoBandMatrix {
        let n = self.n();
        let shift: Vec<f64> = self.v.iter().map(|w| 1.0 + self.sigma * w).collect();
        match &self.a {
            Some(a) => {
                let mut m = a.clone();
                m.add_diag(&shift);
                m
            }
            None => {
                let off = n.saturating_sub(2);
                TwoBandMatrix::new(shift, vec![0.0; off], vec![0.0; off])
                    .expect("consistent lengths")
            }
        }
    }

    /// `I + sigma V + A + B` densely.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = self.banded_part().to_dense();
        if let Some(b) = &self.b {
            m.add_assign(b);
        }
        m
    }
}
