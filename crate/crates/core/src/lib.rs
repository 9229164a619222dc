//! Filtered-interpolation collocation-quadrature solver for Prandtl-type
//! equations
//!
//! ```text
//! sigma f(y) + D f(y) + K f(y) + H f(y) = g(y),   -1 < y < 1,
//! ```
//!
//! where `D` is the hypersingular (finite-part) operator, `K` the
//! logarithmic-kernel operator and `H` a smooth-kernel operator, all taken
//! against the weight `phi(x) = sqrt(1 - x^2)`.
//!
//! The unknown is sought in the span of the modified VP basis `q~_j`, the
//! equation is projected by the de la Vallee Poussin quasi-projection
//! `V_n^m` onto the span of `q_j`, and the resulting `n x n` system is
//! solved either by a pivot-free 2-bandwidth elimination (no `H`) or by
//! dense LU.
//!
//! Module map:
//!
//! - [`chebyshev`]: second-kind Chebyshev polynomials, nodes, Christoffel
//!   numbers, Gauss-Chebyshev quadrature.
//! - [`vp_basis`]: filter coefficients, fundamental VP polynomials, the
//!   `q` / `q~` bases and their scalar tables.
//! - [`vp_interp`]: the quasi-projection acting on samples, evaluation and
//!   a Lebesgue-function probe.
//! - [`operators`]: spectral actions of `D` and `K`, and assembly of the
//!   system matrices.
//! - [`solver`]: banded and dense solvers, condition numbers.
//! - [`benchmark`]: reference problems, weighted error metric, tables.
//! - [`cli`]: command-line front-end.

pub mod benchmark;
pub mod chebyshev;
pub mod cli;
mod error;
pub mod matrix;
pub mod operators;
pub mod solver;
pub mod vp_basis;
pub mod vp_interp;

pub use error::{Error, Result};

pub use benchmark::{ErrorReport, ProblemSpec};
pub use chebyshev::ChebyshevGrid;
pub use matrix::{DenseMatrix, TwoBandMatrix};
pub use operators::{OperatorCoeffs, SystemMatrices};
pub use solver::{SolvePath, SolveReport, SolverChoice};
pub use vp_basis::{VpBasisTables, VpParams};
pub use vp_interp::{Basis, VpFunction};
