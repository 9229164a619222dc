//! Reference problems, the weighted error metric and convergence tables.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::chebyshev::{eval_p, SQRT_2_OVER_PI};
use crate::operators::k_on_p;
use crate::solver::{build_and_solve, solve_reference, SolvePath, SolverChoice};
use crate::vp_basis::VpParams;
use crate::vp_interp::{uniform_mesh, VpFunction};
use crate::{Error, Result};

/// Default size of the uniform error mesh.
pub const DEFAULT_ERROR_MESH: usize = 1001;

/// Environment variable capping the number of table rows solved in
/// parallel; `0` runs them sequentially.
pub const THREADS_ENV: &str = "PRANDTL_VP_THREADS";

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `h(x, y)` with `x` the integration variable and `y` the collocation point.
pub type Kernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `sigma f + D f [+ K f] [+ H f] = g`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub sigma: f64,
    pub include_k: bool,
    pub kernel: Option<Kernel>,
    pub rhs: ScalarFn,
    pub exact: Option<ScalarFn>,
    /// Parameters of a fine solve used in place of an exact solution.
    pub reference: Option<VpParams>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("sigma", &self.sigma)
            .field("include_k", &self.include_k)
            .field("kernel", &self.kernel.is_some())
            .field("exact", &self.exact.is_some())
            .field("reference", &self.reference)
            .finish()
    }
}

impl ProblemSpec {
    /// A problem without `H`, exact solution or reference.
    pub fn new<G>(sigma: f64, include_k: bool, rhs: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ProblemSpec {
            name: "custom".into(),
            sigma,
            include_k,
            kernel: None,
            rhs: Arc::new(rhs),
            exact: None,
            reference: None,
        }
    }

    pub fn with_kernel<H>(mut self, h: H) -> Self
    where
        H: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.kernel = Some(Arc::new(h));
        self
    }

    pub fn with_exact<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.exact = Some(Arc::new(f));
        self.reference = None;
        self
    }

    pub fn with_reference(mut self, params: VpParams) -> Self {
        self.reference = Some(params);
        self.exact = None;
        self
    }

    fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

/// Right-hand side of the first reference problem,
/// `y [ (1 + 4y/(15 pi)) |y| + 6/pi + (3y^2 - 2)/(pi s) log((1+s)/(1-s)) ]`
/// with `s = sqrt(1 - y^2)`.
pub fn example1_rhs(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let s = (1.0 - y * y).max(0.0).sqrt();
    // log((1+s)/(1-s)) / s without cancellation at either end
    let log_over_s = if y.abs() < 0.5 {
        2.0 * ((1.0 + s) / y.abs()).ln() / s
    } else if s < 1e-8 {
        2.0 * (1.0 + s * s / 3.0)
    } else {
        2.0 * s.atanh() / s
    };
    y * ((1.0 + 4.0 * y / (15.0 * PI)) * y.abs() + 6.0 / PI + (3.0 * y * y - 2.0) / PI * log_over_s)
}

pub fn example1_kernel(x: f64, y: f64) -> f64 {
    x * (y * y * y.abs() + x * x.abs())
}

pub fn example2_kernel(x: f64, y: f64) -> f64 {
    (y - PI / 4.0).cos().abs().powf(4.5) + x.sin().abs().powf(3.5)
}

pub fn example3_rhs(y: f64) -> f64 {
    2.0 + y.abs() / 2.0 + 2.0 / (3.0 * PI) + 0.25 * (1.0 - 2.0 * y * y + 2.0 * LN_2)
}

/// Exact solution of the fourth reference problem.
pub fn example4_exact(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).powf(1.5)
}

/// Closed form of `2 f + D f + K f` for `f = (1 - y^2)^{3/2}`:
///
/// ```text
/// D f = 4/(3 pi) [4 - 6y^2 + 3y(1-y^2) L]
/// K f = 1/pi [(y^5/5 - 2y^3/3 + y) L + 2y^4/5 - 6y^2/5 - 8/15 log(1-y^2) + 368/225]
/// L   = log((1-y)/(1+y))
/// ```
pub fn example4_rhs(y: f64) -> f64 {
    let y2 = y * y;
    let l = ((1.0 - y) / (1.0 + y)).ln();
    let d = 4.0 / (3.0 * PI) * (4.0 - 6.0 * y2 + 3.0 * y * (1.0 - y2) * l);
    let k = ((y2 * y2 * y / 5.0 - 2.0 * y2 * y / 3.0 + y) * l + 2.0 * y2 * y2 / 5.0
        - 6.0 * y2 / 5.0
        - 8.0 / 15.0 * (1.0 - y2).ln()
        + 368.0 / 225.0)
        / PI;
    2.0 * example4_exact(y) + d + k
}

/// `<(1 - x^2)^{3/2}, p_j>`: zero for odd `j`, otherwise
/// `sqrt(2/pi) 48 / ((j+1)((j+1)^2 - 4)((j+1)^2 - 16))`.
pub fn example4_coeff(j: usize) -> f64 {
    if j % 2 == 1 {
        return 0.0;
    }
    let k = (j + 1) as f64;
    SQRT_2_OVER_PI * 48.0 / (k * (k * k - 4.0) * (k * k - 16.0))
}

/// Truncated series for the fourth right-hand side,
/// `sum_{j < terms} a_j [(sigma + j + 1) p_j + K p_j]` with `sigma = 2`.
pub fn example4_rhs_series(y: f64, terms: usize) -> Result<f64> {
    let mut s = 0.0;
    for j in (0..terms).step_by(2) {
        let a = example4_coeff(j);
        let (lo, mid, hi) = k_on_p(j);
        let mut v = (3.0 + j as f64 + mid) * eval_p(j, y)? + hi * eval_p(j + 2, y)?;
        if j >= 2 {
            v += lo * eval_p(j - 2, y)?;
        }
        s += a * v;
    }
    Ok(s)
}

/// The four reference problems.
pub fn example(id: u8) -> Result<ProblemSpec> {
    Ok(match id {
        1 => ProblemSpec::new(1.0, false, example1_rhs)
            .with_kernel(example1_kernel)
            .with_exact(|y| y * y.abs())
            .named("example 1"),
        2 => ProblemSpec::new(1.0, true, |y: f64| y.abs().powf(5.5))
            .with_kernel(example2_kernel)
            .with_reference(VpParams::from_even_n(1024)?)
            .named("example 2"),
        3 => ProblemSpec::new(1.0, true, example3_rhs)
            .with_kernel(|x: f64, y: f64| y.abs() + x.abs())
            .with_exact(|_| 1.0)
            .named("example 3"),
        4 => ProblemSpec::new(2.0, true, example4_rhs)
            .with_exact(example4_exact)
            .named("example 4"),
        _ => return Err(Error::UnknownExample(id)),
    })
}

/// `N` values of the published convergence tables.
pub fn table_sizes(id: u8) -> Result<Vec<usize>> {
    match id {
        1 | 3 | 4 => Ok(vec![8, 16, 32, 64, 128, 256, 512]),
        2 => Ok(vec![8, 16, 32, 64, 128, 256]),
        _ => Err(Error::UnknownExample(id)),
    }
}

/// `max_x |f(x) - f_n(x)| sqrt(1 - x^2)` over `mesh_size` equispaced
/// points of `[-1, 1]`.
pub fn weighted_error<F>(solution: &VpFunction, reference: &F, mesh_size: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    if mesh_size < 2 {
        return Err(Error::InvalidParams(format!(
            "error mesh needs at least 2 points, got {mesh_size}"
        )));
    }
    let mesh = uniform_mesh(mesh_size);
    let errs: Vec<f64> = mesh
        .par_iter()
        .map(|&x| -> Result<f64> {
            let phi = (1.0 - x * x).max(0.0).sqrt();
            if phi == 0.0 {
                return Ok(0.0);
            }
            Ok((reference(x) - solution.eval(x)?).abs() * phi)
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub m: usize,
    pub error_weighted: f64,
    pub cond_inf: f64,
    pub residual_inf: f64,
    pub mesh_size: usize,
    pub path: SolvePath,
    pub elapsed: Duration,
}

/// Solves `problem` at every entry of `params` and measures the weighted
/// error against the exact solution or the reference solve.
pub fn run_problem(
    problem: &ProblemSpec,
    params: &[VpParams],
    mesh_size: usize,
) -> Result<Vec<ErrorReport>> {
    let reference: ScalarFn = match (&problem.exact, problem.reference) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => {
            let r = solve_reference(problem, p)?;
            Arc::new(move |x| r.eval(x).unwrap_or(f64::NAN))
        }
        (None, None) => {
            return Err(Error::InvalidParams(format!(
                "{} has neither an exact solution nor a reference",
                problem.name
            )))
        }
    };
    let row = |p: &VpParams| -> Result<ErrorReport> {
        let start = Instant::now();
        let rep = build_and_solve(problem, *p, SolverChoice::Auto)?;
        let error_weighted = weighted_error(&rep.solution, &*reference, mesh_size)?;
        Ok(ErrorReport {
            n: p.n(),
            m: p.m(),
            error_weighted,
            cond_inf: rep.cond_inf,
            residual_inf: rep.residual_inf,
            mesh_size,
            path: rep.path,
            elapsed: start.elapsed(),
        })
    };
    match sweep_threads() {
        Some(0) => params.iter().map(row).collect(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(|| params.par_iter().map(row).collect()),
        None => params.par_iter().map(row).collect(),
    }
}

/// [`run_problem`] on reference problem `id`.
pub fn run_table(id: u8, params: &[VpParams], mesh_size: usize) -> Result<Vec<ErrorReport>> {
    run_problem(&example(id)?, params, mesh_size)
}

fn sweep_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok()
}

pub const CSV_HEADER: [&str; 6] = ["n", "m", "error_weighted", "cond_inf", "path", "elapsed_s"];

/// CSV with 17 significant digits per float.
pub fn write_csv<W: Write>(reports: &[ErrorReport], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidParams(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            format!("{:.16e}", r.error_weighted),
            format!("{:.16e}", r.cond_inf),
            r.path.as_str().to_string(),
            format!("{:.16e}", r.elapsed.as_secs_f64()),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidParams(format!("csv output failed: {e}")))
}

/// Three significant digits, fixed notation for moderate magnitudes.
pub fn sig3(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !(1e-2..1e3).contains(&a) {
        return format!("{v:.2e}");
    }
    let decimals = (2 - a.log10().floor() as i32).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Markdown table with columns `n`, `m`, `cond`, `error`.
pub fn to_markdown(title: &str, reports: &[ErrorReport]) -> String {
    let mut s = format!("### {title}\n\n| n | m | cond | E_n |\n|---:|---:|---:|---:|\n");
    for r in reports {
        s.push_str(&format!(
            "| {} | {} | {} | {:.2e} |\n",
            r.n,
            r.m,
            sig3(r.cond_inf),
            r.error_weighted
        ));
    }
    s
}
