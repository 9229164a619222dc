//! Command-line front-end: single solves, convergence tables and invariant
//! probes.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::benchmark::{
    example, run_problem, sig3, table_sizes, to_markdown, weighted_error, write_csv,
    DEFAULT_ERROR_MESH,
};
use crate::chebyshev::ChebyshevGrid;
use crate::operators::{assemble_banded_system, operator_coeffs};
use crate::solver::{
    build_and_solve, rhs_from_samples, solve_banded, solve_dense, solve_parity_split,
    solve_reference, solve_system, SolveReport, SolverChoice,
};
use crate::vp_basis::VpParams;
use crate::vp_interp::{lebesgue_probe, uniform_mesh, DEFAULT_PROBE_MESH};
use crate::{Error, ProblemSpec};

/// Default localisation ratio `m / n`.
pub const DEFAULT_THETA: f64 = 1.0 / 3.0;

#[derive(Debug, Parser)]
#[command(
    name = "prandtl-vp",
    version,
    about = "VP-filtered collocation solver for Prandtl-type hypersingular equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Auto,
    Banded,
    Dense,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Auto => SolverChoice::Auto,
            SolverArg::Banded => SolverChoice::Banded,
            SolverArg::Dense => SolverChoice::Dense,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    Lebesgue,
    Dominance,
    Decoupling,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and print n, m, cond, error and residual.
    Solve {
        /// Reference problem 1..4.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), conflicts_with = "samples")]
        example: Option<u8>,
        /// CSV of node samples `k,g_value` (1-based k) of a custom right-hand side.
        #[arg(long, requires = "sigma")]
        samples: Option<PathBuf>,
        /// sigma of a custom problem.
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
        /// Include the logarithmic operator K in a custom problem.
        #[arg(long = "with-K")]
        with_k: bool,
        /// System size.
        #[arg(long, conflicts_with = "big_n")]
        n: Option<usize>,
        /// Filter width, default round(n/3).
        #[arg(long, requires = "n")]
        m: Option<usize>,
        /// Even table parameter: n = 3N/2, m = N/2.
        #[arg(long = "N", id = "big_n")]
        big_n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_ERROR_MESH)]
        mesh: usize,
        #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
        solver: SolverArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the solution coefficients `j,coeff` over the q~ basis here.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Convergence table of a reference problem.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        example: u8,
        /// Even table parameters (n = 3N/2, m = N/2); defaults to the published rows.
        #[arg(long = "N", id = "big_n", value_delimiter = ',', conflicts_with = "n")]
        big_n: Vec<usize>,
        /// System sizes, with m = round(n/3).
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_ERROR_MESH)]
        mesh: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scan an invariant over a list of sizes.
    Probe {
        #[arg(long, value_enum)]
        what: ProbeKind,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        /// Mesh size of the Lebesgue probe.
        #[arg(long, default_value_t = DEFAULT_PROBE_MESH)]
        mesh: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag combination or value (exit 2).
    Usage(String),
    /// Numerical or I/O failure (exit 1).
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::UnknownExample(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let (kind, msg) = match &e {
                CliError::Usage(m) => ("usage error", m),
                CliError::Failure(m) => ("error", m),
            };
            let _ = writeln!(err, "{kind}: {msg}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Solve {
            example: ex,
            samples,
            sigma,
            with_k,
            n,
            m,
            big_n,
            mesh,
            solver,
            format,
            coeffs,
            output,
        } => {
            let mut sink = Sink::open(output.as_deref(), stdout)?;
            let report = match (ex, samples) {
                (Some(id), None) => {
                    let params = solve_params(n, m, big_n)?
                        .ok_or_else(|| usage("solve needs --n or --N"))?;
                    let problem = example(id)?;
                    let rep = build_and_solve(&problem, params, solver.into())?;
                    let err = reference_error(&problem, &rep, mesh)?;
                    write_solve(&mut sink, format, params, &rep, Some(err))?;
                    rep
                }
                (None, Some(path)) => {
                    let sigma = sigma.ok_or_else(|| usage("--samples needs --sigma"))?;
                    let values = read_samples(&path)?;
                    let params = match solve_params(n, m, big_n)? {
                        Some(p) => p,
                        None => VpParams::from_theta(values.len(), DEFAULT_THETA)?,
                    };
                    if values.len() != params.n() {
                        return Err(usage(&format!(
                            "{} has {} samples but the grid has {} nodes",
                            path.display(),
                            values.len(),
                            params.n()
                        )));
                    }
                    let grid = ChebyshevGrid::new(params.n())?;
                    let rhs = rhs_from_samples(&values, &grid)?;
                    let problem = ProblemSpec::new(sigma, with_k, |_| f64::NAN);
                    let rep = solve_system(&problem, params, &grid, rhs, solver.into())?;
                    write_solve(&mut sink, format, params, &rep, None)?;
                    rep
                }
                (None, None) => return Err(usage("solve needs --example or --samples")),
                (Some(_), Some(_)) => unreachable!("clap rejects --example with --samples"),
            };
            if let Some(path) = coeffs {
                let mut f = io::BufWriter::new(File::create(&path)?);
                writeln!(f, "j,coeff")?;
                for (j, c) in report.solution.coeffs().iter().enumerate() {
                    writeln!(f, "{j},{c:.16e}")?;
                }
                f.flush()?;
            }
            Ok(())
        }
        Command::Table {
            example: id,
            big_n,
            n,
            mesh,
            format,
            output,
        } => {
            let params: Vec<VpParams> = if !n.is_empty() {
                n.iter()
                    .map(|&n| VpParams::from_theta(n, DEFAULT_THETA))
                    .collect::<crate::Result<_>>()?
            } else {
                let list = if big_n.is_empty() {
                    table_sizes(id)?
                } else {
                    big_n
                };
                list.into_iter()
                    .map(VpParams::from_even_n)
                    .collect::<crate::Result<_>>()?
            };
            if params.windows(2).any(|w| w[0].n() >= w[1].n()) {
                return Err(usage("table sizes must be strictly ascending"));
            }
            let problem = example(id)?;
            let reports = run_problem(&problem, &params, mesh)?;
            let mut sink = Sink::open(output.as_deref(), stdout)?;
            match format {
                Format::Csv => write_csv(&reports, &mut sink)?,
                Format::Md => write!(sink, "{}", to_markdown(&problem.name, &reports))?,
            }
            sink.flush()?;
            Ok(())
        }
        Command::Probe {
            what,
            n,
            sigma,
            theta,
            mesh,
            output,
        } => {
            let mut sink = Sink::open(output.as_deref(), stdout)?;
            probe(&mut sink, what, &n, sigma, theta, mesh)?;
            sink.flush()?;
            Ok(())
        }
    }
}

fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.to_string())
}

fn solve_params(
    n: Option<usize>,
    m: Option<usize>,
    big_n: Option<usize>,
) -> Result<Option<VpParams>, CliError> {
    Ok(match (n, m, big_n) {
        (Some(n), Some(m), None) => Some(VpParams::new(n, m)?),
        (Some(n), None, None) => Some(VpParams::from_theta(n, DEFAULT_THETA)?),
        (None, None, Some(big)) => Some(VpParams::from_even_n(big)?),
        (None, None, None) => None,
        _ => return Err(usage("give either --n [--m] or --N")),
    })
}

fn reference_error(problem: &ProblemSpec, rep: &SolveReport, mesh: usize) -> Result<f64, CliError> {
    Ok(match (&problem.exact, problem.reference) {
        (Some(f), _) => weighted_error(&rep.solution, &**f, mesh)?,
        (None, Some(p)) => {
            let r = solve_reference(problem, p)?;
            weighted_error(&rep.solution, &|x| r.eval(x).unwrap_or(f64::NAN), mesh)?
        }
        (None, None) => f64::NAN,
    })
}

fn write_solve(
    out: &mut Sink,
    format: Format,
    params: VpParams,
    rep: &SolveReport,
    error: Option<f64>,
) -> Result<(), CliError> {
    let err_text = |digits17: bool| match error {
        Some(e) if digits17 => format!("{e:.16e}"),
        Some(e) => format!("{e:.2e}"),
        None => String::new(),
    };
    match format {
        Format::Csv => {
            writeln!(out, "n,m,cond_inf,error_weighted,residual_inf,path")?;
            writeln!(
                out,
                "{},{},{:.16e},{},{:.16e},{}",
                params.n(),
                params.m(),
                rep.cond_inf,
                err_text(true),
                rep.residual_inf,
                rep.path.as_str()
            )?;
        }
        Format::Md => {
            writeln!(out, "| n | m | cond | E_n | residual | path |")?;
            writeln!(out, "|---:|---:|---:|---:|---:|:---|")?;
            writeln!(
                out,
                "| {} | {} | {} | {} | {:.2e} | {} |",
                params.n(),
                params.m(),
                sig3(rep.cond_inf),
                err_text(false),
                rep.residual_inf,
                rep.path.as_str()
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads `k,g_value` rows (1-based `k`, optional header) into node order.
pub fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Failure(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != 2 {
            return Err(bad(format!(
                "line {} has {} fields, expected 2",
                i + 1,
                rec.len()
            )));
        }
        let k = match rec[0].parse::<usize>() {
            Ok(k) => k,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(bad(format!("line {}: bad node index {:?}", i + 1, &rec[0]))),
        };
        let v: f64 = rec[1]
            .parse()
            .map_err(|_| bad(format!("line {}: bad value {:?}", i + 1, &rec[1])))?;
        rows.push((k, v));
    }
    let n = rows.len();
    let mut values = vec![None; n];
    for (k, v) in rows {
        if k == 0 || k > n {
            return Err(bad(format!("node index {k} outside 1..={n}")));
        }
        if values[k - 1].replace(v).is_some() {
            return Err(bad(format!("node index {k} repeated")));
        }
    }
    Ok(values
        .into_iter()
        .map(|v| v.expect("all indices seen"))
        .collect())
}

fn probe(
    out: &mut Sink,
    what: ProbeKind,
    sizes: &[usize],
    sigma: f64,
    theta: f64,
    mesh: usize,
) -> Result<(), CliError> {
    match what {
        ProbeKind::Lebesgue => {
            writeln!(out, "n,m,lebesgue")?;
            let xs = uniform_mesh(mesh);
            for &n in sizes {
                let p = VpParams::from_theta(n, theta)?;
                let v = lebesgue_probe(p, &xs)?;
                writeln!(out, "{},{},{:.16e}", p.n(), p.m(), v)?;
            }
        }
        ProbeKind::Dominance => {
            writeln!(out, "n,m,sigma,row,min_margin,dominant")?;
            for &n in sizes {
                let p = VpParams::from_theta(n, theta)?;
                let band = assemble_banded_system(&operator_coeffs(p, sigma), true);
                let (row, margin) = band.min_row_margin();
                writeln!(
                    out,
                    "{},{},{:.16e},{},{:.16e},{}",
                    p.n(),
                    p.m(),
                    sigma,
                    row,
                    margin,
                    margin > 0.0
                )?;
            }
        }
        ProbeKind::Decoupling => {
            writeln!(out, "n,m,sigma,reference,max_abs_diff")?;
            for &n in sizes {
                let p = VpParams::from_theta(n, theta)?;
                let band = assemble_banded_system(&operator_coeffs(p, sigma), true);
                let rhs: Vec<f64> = (0..n).map(|j| ((j as f64 + 1.0) * 0.7).sin()).collect();
                let split = solve_parity_split(&band, &rhs)?;
                let (name, full) = match solve_banded(&band, &rhs) {
                    Ok(s) => ("banded", s.x),
                    Err(Error::NotDiagonallyDominant { .. }) => {
                        ("dense", solve_dense(&band.to_dense(), &rhs)?)
                    }
                    Err(e) => return Err(e.into()),
                };
                let diff = split
                    .iter()
                    .zip(&full)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                writeln!(
                    out,
                    "{},{},{:.16e},{},{:.16e}",
                    p.n(),
                    p.m(),
                    sigma,
                    name,
                    diff
                )?;
            }
        }
    }
    Ok(())
}

/// Standard output or a file.
enum Sink<'a> {
    Out(&'a mut dyn Write),
    File(io::BufWriter<File>),
}

impl<'a> Sink<'a> {
    fn open(path: Option<&Path>, out: &'a mut dyn Write) -> Result<Self, CliError> {
        Ok(match path {
            Some(p) => Sink::File(io::BufWriter::new(File::create(p).map_err(|e| {
                CliError::Failure(format!("cannot create {}: {e}", p.display()))
            })?)),
            None => Sink::Out(out),
        })
    }
}

impl Write for Sink<'_> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Out(w) => w.write(buf),
            Sink::File(f) => f.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Out(w) => w.flush(),
            Sink::File(f) => f.flush(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("prandtl-vp").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn flag_errors_exit_2() {
        assert_eq!(run_capture(&["solve", "--example", "7", "--n", "12"]).0, 2);
        assert_eq!(run_capture(&["solve", "--example", "3", "--N", "33"]).0, 2);
        assert_eq!(run_capture(&["solve", "--example", "3"]).0, 2);
        assert_eq!(
            run_capture(&["solve", "--example", "3", "--n", "12", "--N", "8"]).0,
            2
        );
        assert_eq!(
            run_capture(&["probe", "--what", "nothing", "--n", "8"]).0,
            2
        );
        assert_eq!(run_capture(&["bogus"]).0, 2);
    }

    #[test]
    fn solve_prints_one_row() {
        let (code, out, _) = run_capture(&["solve", "--example", "4", "--N", "16"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "n,m,cond_inf,error_weighted,residual_inf,path");
        let f: Vec<&str> = lines[1].split(',').collect();
        assert_eq!((f[0], f[1], f[5]), ("24", "8", "banded"));
    }

    #[test]
    fn banded_refusal_exits_1() {
        let (code, _, err) =
            run_capture(&["solve", "--example", "3", "--N", "8", "--solver", "banded"]);
        // H present: the banded path is a usage error
        assert_eq!(code, 2, "{err}");
    }
}
