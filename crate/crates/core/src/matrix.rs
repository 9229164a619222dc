//! Small dense and 2-bandwidth matrix containers.

use std::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        gemm(self, false, other, false, &mut out);
        Ok(out)
    }

    /// `self * other^T`.
    pub fn matmul_transposed(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.rows);
        gemm(self, false, other, true, &mut out);
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Multiplies column `j` by `scale[j]`.
    pub(crate) fn scale_columns(&mut self, scale: &[f64]) {
        debug_assert_eq!(scale.len(), self.cols);
        for row in self.data.chunks_mut(self.cols) {
            for (v, s) in row.iter_mut().zip(scale) {
                *v *= s;
            }
        }
    }

    pub(crate) fn add_assign(&mut self, other: &DenseMatrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

fn gemm(a: &DenseMatrix, ta: bool, b: &DenseMatrix, tb: bool, c: &mut DenseMatrix) {
    let (m, k) = if ta {
        (a.cols, a.rows)
    } else {
        (a.rows, a.cols)
    };
    let n = if tb { b.rows } else { b.cols };
    let (rsa, csa) = if ta {
        (1, a.cols as isize)
    } else {
        (a.cols as isize, 1)
    };
    let (rsb, csb) = if tb {
        (1, b.cols as isize)
    } else {
        (b.cols as isize, 1)
    };
    // SAFETY: dimensions and strides describe exactly the three buffers,
    // and `c` does not alias `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            0.0,
            c.data.as_mut_ptr(),
            c.cols as isize,
            1,
        );
    }
}

/// Square matrix whose only nonzeros sit at `|i - j| in {0, 2}`.
///
/// `upper[j] = M[j][j+2]` and `lower[j] = M[j+2][j]`; the `+-1` diagonals
/// are identically zero by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBandMatrix {
    diag: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl TwoBandMatrix {
    pub fn new(diag: Vec<f64>, upper: Vec<f64>, lower: Vec<f64>) -> Result<Self> {
        let off = diag.len().saturating_sub(2);
        for len in [upper.len(), lower.len()] {
            if len != off {
                return Err(Error::LengthMismatch {
                    expected: off,
                    got: len,
                });
            }
        }
        Ok(TwoBandMatrix { diag, upper, lower })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 2 {
            self.upper[i]
        } else if i == j + 2 {
            self.lower[j]
        } else {
            0.0
        }
    }

    /// Adds `values[j]` to the diagonal.
    pub(crate) fn add_diag(&mut self, values: &[f64]) {
        for (d, v) in self.diag.iter_mut().zip(values) {
            *d += v;
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: v.len(),
            });
        }
        Ok((0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i + 2 < n {
                    s += self.upper[i] * v[i + 2];
                }
                if i >= 2 {
                    s += self.lower[i - 2] * v[i - 2];
                }
                s
            })
            .collect())
    }

    /// `|M[j][j]| - sum_{i != j} |M[j][i]|` for every row.
    pub fn row_margins(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|j| {
                let mut off = 0.0;
                if j >= 2 {
                    off += self.lower[j - 2].abs();
                }
                if j + 2 < n {
                    off += self.upper[j].abs();
                }
                self.diag[j].abs() - off
            })
            .collect()
    }

    /// Smallest row margin and the row where it occurs.
    pub fn min_row_margin(&self) -> (usize, f64) {
        self.row_margins()
            .into_iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (j, v)| {
                    if v < best.1 {
                        (j, v)
                    } else {
                        best
                    }
                },
            )
    }

    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        self.row_margins().iter().all(|&m| m > 0.0)
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j].abs();
                if j >= 2 {
                    s += self.lower[j - 2].abs();
                }
                if j + 2 < n {
                    s += self.upper[j].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n(), self.n(), |i, j| self.get(i, j))
    }
}
