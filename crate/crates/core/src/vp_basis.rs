//! VP filter coefficients, fundamental VP polynomials and the orthogonal
//! bases `q_j` (range of the quasi-projection) and `q~_j` (solution space).

use std::f64::consts::PI;

use crate::chebyshev::{Angle, SQRT_2_OVER_PI};
use crate::{Error, Result};

/// Degree parameters of the VP filter: `n` interpolation nodes and action
/// ray `m`, with `0 < m < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VpParams {
    n: usize,
    m: usize,
}

impl VpParams {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m >= n {
            return Err(Error::InvalidParams(format!(
                "need 0 < m < n, got n = {n}, m = {m}"
            )));
        }
        Ok(VpParams { n, m })
    }

    /// Filter acting from an even `N` to `2N - 1`: `n = 3N/2`, `m = N/2`
    /// (localization ratio 1/3).
    pub fn from_even_n(big_n: usize) -> Result<Self> {
        if big_n == 0 || !big_n.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "N must be a positive even integer, got {big_n}"
            )));
        }
        Self::new(3 * big_n / 2, big_n / 2)
    }

    /// `m = max(1, round(theta * n))`.
    pub fn from_theta(n: usize, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParams(format!(
                "theta must lie in (0, 1), got {theta}"
            )));
        }
        let m = ((theta * n as f64).round() as usize).max(1);
        Self::new(n, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// Indices `j <= n - m` use the pure Chebyshev branch of every basis.
    pub(crate) fn is_pure(&self, j: usize) -> bool {
        j <= self.n - self.m
    }

    /// Blend weights `((m+n-j)/(2m), (m-n+j)/(2m))` of `p_j` and `p_{2n-j}`
    /// in the range `n-m < j < n`.
    pub(crate) fn blend(&self, j: usize) -> (f64, f64) {
        let (n, m, j) = (self.n as f64, self.m as f64, j as f64);
        ((m + n - j) / (2.0 * m), (m - n + j) / (2.0 * m))
    }
}

/// VP filter coefficient `mu_{n,j}^m`: 1 up to degree `n-m`, then linear
/// decay `(n+m-j)/(2m)` for `n-m < j < n+m`.
pub fn filter_mu(params: VpParams, j: usize) -> Result<f64> {
    let (n, m) = (params.n, params.m);
    if j >= n + m {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: n + m,
        });
    }
    Ok(if j <= n - m {
        1.0
    } else {
        (n + m - j) as f64 / (2 * m) as f64
    })
}

fn check_node(params: VpParams, k: usize) -> Result<()> {
    if k == 0 || k > params.n {
        return Err(Error::IndexOutOfRange {
            index: k,
            limit: params.n + 1,
        });
    }
    Ok(())
}

fn check_index(params: VpParams, j: usize) -> Result<()> {
    if j >= params.n {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: params.n,
        });
    }
    Ok(())
}

/// Distance from a removable singularity of the trigonometric form below
/// which the spectral sum is used instead.
pub const PHI_ANGLE_GUARD: f64 = 1e-6;
/// `|sin t|` below which the spectral sum is used.
pub const PHI_SIN_GUARD: f64 = 1e-8;

/// Fundamental VP polynomial `Phi_{n,k}^m(x)`, `k = 1..n`.
///
/// Uses the closed trigonometric form; near `t = +-t_k` and near `x = +-1`
/// (0/0 forms) it falls back to [`eval_phi_spectral`].
pub fn eval_phi(params: VpParams, k: usize, x: f64) -> Result<f64> {
    check_node(params, k)?;
    let a = Angle::of(x)?;
    let (n, m) = (params.n as f64, params.m as f64);
    let t = if a.negative { PI - a.t } else { a.t };
    let tk = k as f64 * PI / (n + 1.0);
    let sin_t = t.sin();
    if (t - tk).abs() < PHI_ANGLE_GUARD
        || (t + tk).abs() < PHI_ANGLE_GUARD
        || sin_t.abs() < PHI_SIN_GUARD
    {
        return eval_phi_spectral(params, k, x);
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let dm = 0.5 * (t - tk);
    let dp = 0.5 * (t + tk);
    let bracket =
        (m * (t - tk)).sin() / (dm.sin() * dm.sin()) - (m * (t + tk)).sin() / (dp.sin() * dp.sin());
    Ok(sign * tk.sin() / (4.0 * m * (n + 1.0)) * ((n + 1.0) * t).sin() / sin_t * bracket)
}

/// Fundamental VP polynomial from its filtered spectral sum
/// `lambda_k sum_{j < n+m} mu_j p_j(x_k) p_j(x)`.
pub fn eval_phi_spectral(params: VpParams, k: usize, x: f64) -> Result<f64> {
    check_node(params, k)?;
    let a = Angle::of(x)?;
    let (n, m) = (params.n, params.m);
    let tk = k as f64 * PI / (n + 1) as f64;
    let sin_tk = tk.sin();
    let lambda = PI / (n + 1) as f64 * sin_tk * sin_tk;
    let mut sum = 0.0;
    for j in 0..n + m {
        let pk = SQRT_2_OVER_PI * ((j + 1) as f64 * tk).sin() / sin_tk;
        sum += filter_mu(params, j)? * pk * a.p(j);
    }
    Ok(lambda * sum)
}

pub(crate) fn q_at(params: VpParams, j: usize, a: &Angle) -> f64 {
    if params.is_pure(j) {
        a.p(j)
    } else {
        let (c1, c2) = params.blend(j);
        c1 * a.p(j) - c2 * a.p(2 * params.n - j)
    }
}

pub(crate) fn q_tilde_at(params: VpParams, j: usize, a: &Angle) -> f64 {
    let d1 = (j + 1) as f64;
    if params.is_pure(j) {
        a.p(j) / d1
    } else {
        let (c1, c2) = params.blend(j);
        let j2 = 2 * params.n - j;
        c1 * a.p(j) / d1 - c2 * a.p(j2) / (j2 + 1) as f64
    }
}

/// Orthogonal basis element `q_j` of the VP space, `j = 0..n-1`.
pub fn eval_q(params: VpParams, j: usize, x: f64) -> Result<f64> {
    check_index(params, j)?;
    Ok(q_at(params, j, &Angle::of(x)?))
}

/// Modified basis element `q~_j`, the preimage of `q_j` under `D`.
pub fn eval_q_tilde(params: VpParams, j: usize, x: f64) -> Result<f64> {
    check_index(params, j)?;
    Ok(q_tilde_at(params, j, &Angle::of(x)?))
}

/// Scalar tables shared by every matrix assembly for one `(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VpBasisTables {
    params: VpParams,
    mu: Vec<f64>,
    w: Vec<f64>,
    mixed: Vec<f64>,
    norms_sq: Vec<f64>,
}

impl VpBasisTables {
    pub fn new(params: VpParams) -> Self {
        let (n, m) = (params.n, params.m);
        let mu = (0..n + m)
            .map(|j| filter_mu(params, j).expect("index in range"))
            .collect();
        let (nf, mf) = (n as f64, m as f64);
        let mut w = Vec::with_capacity(n);
        let mut mixed = Vec::with_capacity(n);
        let mut norms_sq = Vec::with_capacity(n);
        for j in 0..n {
            let jf = j as f64;
            if params.is_pure(j) {
                w.push(1.0 / (jf + 1.0));
                mixed.push(1.0 / (jf + 1.0));
                norms_sq.push(1.0);
            } else {
                let a = mf + nf - jf;
                let b = jf - nf + mf;
                let j2 = 2.0 * nf - jf + 1.0;
                w.push((a / (jf + 1.0) + b / j2) / (2.0 * mf));
                mixed.push(a * a / (4.0 * mf * mf * (jf + 1.0)) + b * b / (4.0 * mf * mf * j2));
                norms_sq.push((mf * mf + (nf - jf) * (nf - jf)) / (2.0 * mf * mf));
            }
        }
        VpBasisTables {
            params,
            mu,
            w,
            mixed,
            norms_sq,
        }
    }

    pub fn params(&self) -> VpParams {
        self.params
    }

    /// Filter coefficients `mu_j`, `j = 0..n+m-1`.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Diagonal of the matrix representing `V_n^m` from the `q~` to the `q`
    /// basis.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Mixed products `Q_j = <q_j, q~_j>`.
    pub fn mixed(&self) -> &[f64] {
        &self.mixed
    }

    /// Squared norms `<q_j, q_j>`.
    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }
}

/// Convenience wrapper matching [`VpBasisTables::new`].
pub fn tables(params: VpParams) -> VpBasisTables {
    VpBasisTables::new(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{eval_p, grid};

    fn p(n: usize, m: usize) -> VpParams {
        VpParams::new(n, m).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(VpParams::new(4, 0).is_err());
        assert!(VpParams::new(4, 4).is_err());
        let v = VpParams::from_even_n(64).unwrap();
        assert_eq!((v.n(), v.m()), (96, 32));
        assert!((v.theta() - 1.0 / 3.0).abs() < 1e-15);
        assert!(VpParams::from_even_n(7).is_err());
        let t = VpParams::from_theta(8, 1.0 / 3.0).unwrap();
        assert_eq!(t.m(), 3);
        assert_eq!(VpParams::from_theta(2, 0.1).unwrap().m(), 1);
    }

    #[test]
    fn mu_examples() {
        let v = p(4, 2);
        assert_eq!(filter_mu(v, 1).unwrap(), 1.0);
        assert_eq!(filter_mu(v, 4).unwrap(), 0.5);
        assert_eq!(filter_mu(v, 5).unwrap(), 0.25);
        assert!(filter_mu(v, 6).is_err());
    }

    #[test]
    fn mu_profile() {
        let v = p(30, 10);
        let t = tables(v);
        let mu = t.mu();
        assert_eq!(mu.len(), 40);
        assert!(mu[..=20].iter().all(|&v| v == 1.0));
        for j in 21..40 {
            assert!(mu[j] < mu[j - 1] && mu[j] > 0.0);
        }
        assert_eq!(mu[39], 1.0 / 20.0);
    }

    #[test]
    fn table_examples() {
        let t = tables(p(4, 2));
        assert!((t.w()[3] - 11.0 / 48.0).abs() < 1e-15);
        assert!((t.mixed()[3] - (9.0 / 64.0 + 1.0 / 96.0)).abs() < 1e-15);
        assert!((t.norms_sq()[3] - 5.0 / 8.0).abs() < 1e-15);
        for v in [p(4, 2), p(9, 1), p(96, 32)] {
            let t = tables(v);
            assert_eq!(t.w()[0], 1.0);
            assert_eq!(t.mixed()[0], 1.0);
        }
    }

    #[test]
    fn w_and_mixed_branches() {
        let v = p(12, 4);
        let t = tables(v);
        let mut differs = 0;
        for j in 0..12 {
            if j <= 8 {
                assert_eq!(t.w()[j], 1.0 / (j + 1) as f64);
                assert_eq!(t.w()[j], t.mixed()[j]);
                assert_eq!(t.norms_sq()[j], 1.0);
            } else {
                assert!((t.w()[j] - t.mixed()[j]).abs() > 1e-6);
                differs += 1;
            }
        }
        assert_eq!(differs, 3);
    }

    #[test]
    fn q_first_element_is_p0() {
        let v = p(6, 2);
        for &x in &[-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_eq!(eval_q(v, 0, x).unwrap(), eval_p(0, x).unwrap());
            assert_eq!(eval_q_tilde(v, 0, x).unwrap(), eval_p(0, x).unwrap());
        }
        assert!(eval_q(v, 6, 0.1).is_err());
        assert!(eval_q_tilde(v, 6, 0.1).is_err());
    }

    #[test]
    fn phi_interpolates_at_nodes() {
        for v in [p(4, 2), p(12, 4), p(25, 7)] {
            let g = grid(v.n()).unwrap();
            for k in 1..=v.n() {
                for (h, &x) in g.nodes().iter().enumerate() {
                    let expect = if h + 1 == k { 1.0 } else { 0.0 };
                    let got = eval_phi(v, k, x).unwrap();
                    assert!((got - expect).abs() < 1e-11, "k={k} h={h}: {got}");
                }
            }
        }
    }

    #[test]
    fn phi_at_endpoints_uses_spectral_form() {
        let v = p(10, 3);
        for k in 1..=10 {
            for x in [-1.0, 1.0] {
                let a = eval_phi(v, k, x).unwrap();
                let b = eval_phi_spectral(v, k, x).unwrap();
                assert_eq!(a, b);
            }
        }
        assert!(eval_phi(v, 0, 0.0).is_err());
        assert!(eval_phi(v, 11, 0.0).is_err());
    }

    #[test]
    fn alternating_node_identity() {
        let v = p(20, 7);
        let g = grid(20).unwrap();
        for j in 14..20 {
            for k in 1..=20 {
                let a = g.p_at_node(2 * 20 - j, k);
                let b = g.p_at_node(j, k);
                assert!((a + b).abs() < 1e-11);
            }
            assert!(!v.is_pure(j));
        }
    }
}
