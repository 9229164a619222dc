//! Linear solvers for the collocation system and condition numbers.
//!
//! Without `H` the system matrix `I + sigma V (+ A)` only couples indices of
//! equal parity and is eliminated without pivoting once strict diagonal
//! dominance has been verified. With `H` the matrix is dense and solved by
//! LU with partial pivoting.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::benchmark::ProblemSpec;
use crate::chebyshev::{discrete_coeffs, ChebyshevGrid};
use crate::matrix::{DenseMatrix, TwoBandMatrix};
use crate::operators::{assemble_b, assemble_banded_system, operator_coeffs, OperatorCoeffs};
use crate::vp_basis::{VpBasisTables, VpParams};
use crate::vp_interp::{Basis, VpFunction};
use crate::{Error, Result};

/// Relative pivot size below which the dense LU reports singularity.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-14;

/// Which elimination produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    Banded,
    Dense,
}

impl SolvePath {
    pub fn as_str(self) -> &'static str {
        match self {
            SolvePath::Banded => "banded",
            SolvePath::Dense => "dense",
        }
    }
}

/// Requested solver. `Auto` takes the banded path when `H` is absent and
/// the band matrix is strictly diagonally dominant, and the dense path
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Auto,
    Banded,
    Dense,
}

/// Outcome of one solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// `f~` over the `q~` basis.
    pub solution: VpFunction,
    /// `g_j = c_{n,j}(g)`.
    pub rhs_coeffs: Vec<f64>,
    pub cond_inf: f64,
    pub path: SolvePath,
    /// Wall time of the whole call, assembly included.
    pub elapsed: Duration,
    /// Wall time of factorisation plus substitution.
    pub solve_elapsed: Duration,
    /// `||M f~ - g||_inf`.
    pub residual_inf: f64,
    /// Multiplications and divisions spent by the banded elimination.
    pub op_count: Option<usize>,
}

/// `g_j = sum_k lambda_k p_j(x_k) g(x_k)`, rejecting non-finite samples.
pub fn rhs_coeffs<G: Fn(f64) -> f64 + ?Sized>(g: &G, grid: &ChebyshevGrid) -> Result<Vec<f64>> {
    let samples = grid.sample(g);
    rhs_from_samples(&samples, grid)
}

/// Same as [`rhs_coeffs`] from precomputed node samples `g(x_k)`.
pub fn rhs_from_samples(samples: &[f64], grid: &ChebyshevGrid) -> Result<Vec<f64>> {
    if let Some((k, v)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            index: k + 1,
            value: *v,
        });
    }
    discrete_coeffs(samples, grid)
}

/// Pivot-free LU of a [`TwoBandMatrix`]:
/// `d_0 = M_00`, `d_1 = M_11`, `v_{k-2} = M_{k,k-2} / d_{k-2}`,
/// `d_k = M_kk - v_{k-2} M_{k-2,k}`.
///
/// `L` is unit lower triangular with `L[k][k-2] = v_{k-2}`, `U` is upper
/// triangular with diagonal `d` and `U[k][k+2] = M[k][k+2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedLU {
    d: Vec<f64>,
    v: Vec<f64>,
    upper: Vec<f64>,
    factor_ops: usize,
}

impl BandedLU {
    /// Factors `m` after checking strict diagonal dominance.
    pub fn factor(m: &TwoBandMatrix) -> Result<Self> {
        let (row, margin) = m.min_row_margin();
        // NaN margins fail as well
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if m.n() > 0 && !(margin > 0.0) {
            return Err(Error::NotDiagonallyDominant { row, margin });
        }
        Ok(Self::factor_unchecked(m))
    }

    fn factor_unchecked(m: &TwoBandMatrix) -> Self {
        let n = m.n();
        let mut d = m.diag().to_vec();
        let mut v = vec![0.0; n.saturating_sub(2)];
        let mut ops = 0;
        for k in 2..n {
            v[k - 2] = m.lower()[k - 2] / d[k - 2];
            d[k] -= v[k - 2] * m.upper()[k - 2];
            ops += 2;
        }
        BandedLU {
            d,
            v,
            upper: m.upper().to_vec(),
            factor_ops: ops,
        }
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Pivots `d_k`.
    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Multipliers `v_k`.
    pub fn multipliers(&self) -> &[f64] {
        &self.v
    }

    /// Multiplications and divisions spent by [`BandedLU::factor`].
    pub fn factor_ops(&self) -> usize {
        self.factor_ops
    }

    /// Solves `L U x = rhs`, returning `x` and the operation count of the
    /// two substitutions.
    pub fn solve_counted(&self, rhs: &[f64]) -> Result<(Vec<f64>, usize)> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let mut x = rhs.to_vec();
        let mut ops = 0;
        for k in 2..n {
            x[k] -= self.v[k - 2] * x[k - 2];
            ops += 1;
        }
        for k in (0..n).rev() {
            if k + 2 < n {
                x[k] -= self.upper[k] * x[k + 2];
                ops += 1;
            }
            x[k] /= self.d[k];
            ops += 1;
        }
        Ok((x, ops))
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve_counted(rhs)?.0)
    }

    /// `L U` assembled back into band form.
    pub fn reconstruct(&self) -> TwoBandMatrix {
        let mut diag = self.d.clone();
        for (k, d) in diag.iter_mut().enumerate().skip(2) {
            *d += self.v[k - 2] * self.upper[k - 2];
        }
        let lower = self.v.iter().zip(&self.d).map(|(v, d)| v * d).collect();
        TwoBandMatrix::new(diag, self.upper.clone(), lower).expect("consistent lengths")
    }

    /// `||M^{-1}||_inf` by solving for every unit vector.
    pub fn inverse_norm_inf(&self) -> f64 {
        let n = self.n();
        let mut row_sums = vec![0.0; n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e).expect("length matches");
            e[j] = 0.0;
            for (s, c) in row_sums.iter_mut().zip(&col) {
                *s += c.abs();
            }
        }
        row_sums.into_iter().fold(0.0, f64::max)
    }
}

/// Solution of a banded system with its operation count.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSolution {
    pub x: Vec<f64>,
    pub op_count: usize,
    pub lu: BandedLU,
}

/// Solves `m x = rhs` by the pivot-free elimination, refusing when `m` is
/// not strictly diagonally dominant.
pub fn solve_banded(m: &TwoBandMatrix, rhs: &[f64]) -> Result<BandedSolution> {
    let lu = BandedLU::factor(m)?;
    let (x, ops) = lu.solve_counted(rhs)?;
    Ok(BandedSolution {
        x,
        op_count: lu.factor_ops + ops,
        lu,
    })
}

/// `(I + sigma V + A) f~ = rhs` for the coefficients of an `H = 0` problem.
pub fn solve_banded_coeffs(coeffs: &OperatorCoeffs, rhs: &[f64]) -> Result<SolveReport> {
    let start = Instant::now();
    let m = assemble_banded_system(coeffs, true);
    let t = Instant::now();
    let sol = solve_banded(&m, rhs)?;
    let solve_elapsed = t.elapsed();
    let cond_inf = m.norm_inf() * sol.lu.inverse_norm_inf();
    let residual_inf = residual(&m.mul_vec(&sol.x)?, rhs);
    Ok(SolveReport {
        solution: VpFunction::new(coeffs.params(), Basis::QTilde, sol.x)?,
        rhs_coeffs: rhs.to_vec(),
        cond_inf,
        path: SolvePath::Banded,
        elapsed: start.elapsed(),
        solve_elapsed,
        residual_inf,
        op_count: Some(sol.op_count),
    })
}

/// Interleaved-parity solve: the even and odd unknowns of a
/// [`TwoBandMatrix`] form two independent tridiagonal systems, each solved
/// by the Thomas algorithm. Used as an independent check of
/// [`solve_banded`].
pub fn solve_parity_split(m: &TwoBandMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.n();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let mut x = vec![0.0; n];
    for parity in 0..2 {
        let idx: Vec<usize> = (parity..n).step_by(2).collect();
        let len = idx.len();
        if len == 0 {
            continue;
        }
        let mut c = vec![0.0; len];
        let mut r = vec![0.0; len];
        let mut b = m.diag()[idx[0]];
        if b == 0.0 {
            return Err(Error::Singular {
                column: idx[0],
                pivot: b,
            });
        }
        if len > 1 {
            c[0] = m.upper()[idx[0]] / b;
        }
        r[0] = rhs[idx[0]] / b;
        for i in 1..len {
            let a = m.lower()[idx[i - 1]];
            b = m.diag()[idx[i]] - a * c[i - 1];
            if b == 0.0 {
                return Err(Error::Singular {
                    column: idx[i],
                    pivot: b,
                });
            }
            if i + 1 < len {
                c[i] = m.upper()[idx[i]] / b;
            }
            r[i] = (rhs[idx[i]] - a * r[i - 1]) / b;
        }
        x[idx[len - 1]] = r[len - 1];
        for i in (0..len - 1).rev() {
            x[idx[i]] = r[i] - c[i] * x[idx[i + 1]];
        }
    }
    Ok(x)
}

/// LU factorisation with partial pivoting, `P M = L U` stored in place.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLU {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl DenseLU {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::LengthMismatch {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        if let Some((i, v)) = m
            .as_slice()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(Error::NonFinite {
                index: i,
                value: *v,
            });
        }
        let n = m.rows();
        let tol = SINGULAR_PIVOT_TOL * m.norm_inf();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)]))
                .fold((k, 0.0_f64), |best, (i, v)| {
                    if v.abs() > best.1.abs() {
                        (i, v)
                    } else {
                        best
                    }
                });
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(pivot.abs() > tol) {
                return Err(Error::Singular { column: k, pivot });
            }
            lu.swap_rows(k, p);
            perm.swap(k, p);
            let pivot_row = lu.row(k)[k + 1..].to_vec();
            for i in k + 1..n {
                let row = lu.row_mut(i);
                let l = row[k] / pivot;
                row[k] = l;
                if l != 0.0 {
                    for (a, b) in row[k + 1..].iter_mut().zip(&pivot_row) {
                        *a -= l * b;
                    }
                }
            }
        }
        Ok(DenseLU { lu, perm })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(a, b)| a * b)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    /// `||M^{-1}||_inf` from the columns of the exact inverse.
    pub fn inverse_norm_inf(&self) -> f64 {
        let n = self.n();
        let cols: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                self.solve(&e).expect("length matches")
            })
            .collect();
        (0..n)
            .map(|i| cols.iter().map(|c| c[i].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    DenseLU::factor(m)?.solve(rhs)
}

/// Exact `||M||_inf ||M^{-1}||_inf`.
pub fn cond_inf(m: &DenseMatrix) -> Result<f64> {
    let lu = DenseLU::factor(m)?;
    Ok(m.norm_inf() * lu.inverse_norm_inf())
}

/// Exact condition number of a band matrix via banded back-solves; the
/// matrix must be strictly diagonally dominant.
pub fn cond_inf_banded(m: &TwoBandMatrix) -> Result<f64> {
    let lu = BandedLU::factor(m)?;
    Ok(m.norm_inf() * lu.inverse_norm_inf())
}

fn residual(mx: &[f64], rhs: &[f64]) -> f64 {
    mx.iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Assembles `I + sigma V + A [K on] + B [H present]` for `problem`,
/// projects its right-hand side and solves.
pub fn build_and_solve(
    problem: &ProblemSpec,
    params: VpParams,
    choice: SolverChoice,
) -> Result<SolveReport> {
    let grid = ChebyshevGrid::new(params.n())?;
    let rhs = rhs_coeffs(&*problem.rhs, &grid)?;
    solve_impl(problem, params, &grid, rhs, choice, true)
}

/// Solution only, without the condition number; used for fine reference
/// solves where the `O(n^3)` inverse would dominate the cost.
pub fn solve_reference(problem: &ProblemSpec, params: VpParams) -> Result<VpFunction> {
    let grid = ChebyshevGrid::new(params.n())?;
    let rhs = rhs_coeffs(&*problem.rhs, &grid)?;
    Ok(solve_impl(problem, params, &grid, rhs, SolverChoice::Auto, false)?.solution)
}

/// Like [`build_and_solve`] but with given right-hand-side coefficients;
/// `problem.rhs` is ignored.
pub fn solve_system(
    problem: &ProblemSpec,
    params: VpParams,
    grid: &ChebyshevGrid,
    rhs: Vec<f64>,
    choice: SolverChoice,
) -> Result<SolveReport> {
    solve_impl(problem, params, grid, rhs, choice, true)
}

fn solve_impl(
    problem: &ProblemSpec,
    params: VpParams,
    grid: &ChebyshevGrid,
    rhs: Vec<f64>,
    choice: SolverChoice,
    with_cond: bool,
) -> Result<SolveReport> {
    let start = Instant::now();
    let n = params.n();
    if grid.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: grid.n(),
        });
    }
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let coeffs = operator_coeffs(params, problem.sigma);
    let band = assemble_banded_system(&coeffs, problem.include_k);

    let banded = match (&problem.kernel, choice) {
        (Some(_), SolverChoice::Banded) => {
            return Err(Error::InvalidParams(
                "the banded solver needs H to be absent".into(),
            ))
        }
        (Some(_), _) | (None, SolverChoice::Dense) => false,
        (None, SolverChoice::Banded) => true,
        (None, SolverChoice::Auto) => band.is_strictly_diagonally_dominant(),
    };

    if banded {
        let t = Instant::now();
        let sol = solve_banded(&band, &rhs)?;
        let solve_elapsed = t.elapsed();
        let cond_inf = if with_cond {
            band.norm_inf() * sol.lu.inverse_norm_inf()
        } else {
            f64::NAN
        };
        let residual_inf = residual(&band.mul_vec(&sol.x)?, &rhs);
        return Ok(SolveReport {
            solution: VpFunction::new(params, Basis::QTilde, sol.x)?,
            rhs_coeffs: rhs,
            cond_inf,
            path: SolvePath::Banded,
            elapsed: start.elapsed(),
            solve_elapsed,
            residual_inf,
            op_count: Some(sol.op_count),
        });
    }

    let mut m = band.to_dense();
    if let Some(h) = &problem.kernel {
        let tables = VpBasisTables::new(params);
        let b = assemble_b(grid, &tables, &**h)?;
        m.add_assign(&b);
    }
    let t = Instant::now();
    let lu = DenseLU::factor(&m)?;
    let x = lu.solve(&rhs)?;
    let solve_elapsed = t.elapsed();
    let cond_inf = if with_cond {
        m.norm_inf() * lu.inverse_norm_inf()
    } else {
        f64::NAN
    };
    let residual_inf = residual(&m.mul_vec(&x)?, &rhs);
    Ok(SolveReport {
        solution: VpFunction::new(params, Basis::QTilde, x)?,
        rhs_coeffs: rhs,
        cond_inf,
        path: SolvePath::Dense,
        elapsed: start.elapsed(),
        solve_elapsed,
        residual_inf,
        op_count: None,
    })
}
