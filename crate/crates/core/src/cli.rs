//! Command-line front end: `solve`, `check` and `curves`.
//!
//! Exit codes: 0 on success, 1 on invalid input or unmet preconditions,
//! 2 when the numerics fail to converge. Results go to stdout, diagnostics
//! to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::classify::classify;
use crate::error::Error;
use crate::fixedpoint::{positive_root, residual};
use crate::io::{emit_result, fmt_float, parse_matrix, MatrixFormat, ResultFormat};
use crate::matrix::Matrix;
use crate::oracle::oracle_solve;
use crate::solver::{multistart_uniqueness, solve, Method, SolverConfig};

pub const SEED_ENV: &str = "INVERSEPOINT_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "inversepoint",
    version,
    about = "Find x > 0 with Mx = (1/x_1, ..., 1/x_n), i.e. diag(x) M diag(x) row-stochastic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the scaling vector and print it with its certificate.
    Solve(SolveArgs),
    /// Print which hypotheses the matrix satisfies.
    Check(InputArgs),
    /// Sample the per-row solution curves (n = 2) or surfaces (n = 3) as CSV.
    Curves(CurveArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "csv")]
    format: MatrixFormat,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value = "auto")]
    method: Method,
    #[arg(long, default_value = "json")]
    output: ResultFormat,
    /// Include the per-iteration residuals in the JSON output.
    #[arg(long)]
    trace: bool,
    /// Emit the brute-force reference solution instead (fixture generation).
    #[arg(long, hide = true)]
    oracle: bool,
    /// After solving, report the spread of solutions from N random starts.
    #[arg(long, hide = true, value_name = "N")]
    multistart: Option<usize>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long = "t-max", default_value_t = 1.5)]
    t_max: f64,
}

/// Runs the CLI with explicit arguments and output streams; returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let seed = match std::env::var(SEED_ENV) {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                let _ = writeln!(err, "error: {SEED_ENV}={s} is not an unsigned integer");
                return EXIT_INPUT;
            }
        },
        Err(_) => None,
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a, seed, out, err),
        Command::Check(a) => cmd_check(&a, out),
        Command::Curves(a) => cmd_curves(&a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn load(input: &InputArgs) -> Result<Matrix, Error> {
    let text = fs::read_to_string(&input.input).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        message: format!("cannot read {}: {e}", input.input.display()),
    })?;
    parse_matrix(&text, input.format)
}

fn io_error(e: std::io::Error) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: format!("write failed: {e}"),
    }
}

fn cmd_solve(
    a: &SolveArgs,
    seed: Option<u64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Error> {
    let m = load(&a.input)?;
    let config = SolverConfig {
        tol: a.tol,
        max_iter: a.max_iter,
        method: a.method,
        seed,
        trace: a.trace,
        ..SolverConfig::default()
    };

    if a.oracle {
        let x = oracle_solve(&m, a.tol)?;
        let items: Vec<String> = x.as_slice().iter().map(|&v| fmt_float(v)).collect();
        writeln!(
            out,
            "{{\"x\":[{}],\"residual\":{}}}",
            items.join(","),
            fmt_float(residual(&m, x.as_slice()))
        )
        .map_err(io_error)?;
        return Ok(EXIT_OK);
    }

    let (result, code) = match solve(&m, &config) {
        Ok(res) => (res, EXIT_OK),
        Err(Error::Convergence(res)) => {
            let _ = writeln!(
                err,
                "warning: not converged after {} iterations (residual {:e})",
                res.iterations, res.residual
            );
            (*res, EXIT_NUMERICAL)
        }
        Err(e) => return Err(e),
    };
    out.write_all(emit_result(&m, &result, a.output)?.as_bytes())
        .map_err(io_error)?;

    if let Some(starts) = a.multistart {
        let (_, spread) = multistart_uniqueness(&m, &config, starts)?;
        let _ = writeln!(err, "multistart: {starts} starts, max pairwise distance {spread:e}");
    }
    Ok(code)
}

fn cmd_check(a: &InputArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let m = load(a)?;
    let c = classify(&m);
    let text = serde_json::to_string(&c).expect("classification serializes");
    writeln!(out, "{text}").map_err(io_error)?;
    Ok(EXIT_OK)
}

fn cmd_curves(a: &CurveArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let m = load(&a.input)?;
    let n = m.n();
    if !(n == 2 || n == 3) {
        return Err(Error::Validation {
            line: 0,
            column: 0,
            message: format!("curves needs a 2x2 or 3x3 matrix, got {n}x{n}"),
        });
    }
    if a.samples == 0 || !(a.t_max > 0.0 && a.t_max.is_finite()) {
        return Err(Error::Validation {
            line: 0,
            column: 0,
            message: "--samples must be >= 1 and --t-max > 0".into(),
        });
    }
    let text = sample_curves(&m, a.samples, a.t_max);
    out.write_all(text.as_bytes()).map_err(io_error)?;
    Ok(EXIT_OK)
}

/// CSV samples of each row's solution set, parameterized by the other
/// coordinates.
///
/// Row `i` of `x_i (Mx)_i = 1` is solved for `x_i` as the positive root of
/// its quadratic while the remaining coordinates run over
/// `t_k = k * t_max / samples`, `k = 1..=samples` (a grid for `n = 3`).
/// Where that root does not exist the coordinate is left empty and the
/// `defined` column is 0.
pub fn sample_curves(m: &Matrix, samples: usize, t_max: f64) -> String {
    let n = m.n();
    let step = t_max / samples as f64;
    let ts: Vec<f64> = (1..=samples).map(|k| k as f64 * step).collect();

    let mut out = String::new();
    let header: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    out.push_str(&format!("curve_index,{},defined\n", header.join(",")));

    let mut emit = |curve: usize, point: &[f64], i: usize| {
        let b: f64 = (0..n).filter(|&j| j != i).map(|j| m.get(i, j) * point[j]).sum();
        let root = positive_root(i, m.get(i, i), b).ok();
        let cells: Vec<String> = (0..n)
            .map(|j| match (j == i, root) {
                (true, Some(r)) => r.to_string(),
                (true, None) => String::new(),
                (false, _) => point[j].to_string(),
            })
            .collect();
        out.push_str(&format!(
            "{},{},{}\n",
            curve,
            cells.join(","),
            u8::from(root.is_some())
        ));
    };

    for i in 0..n {
        let free: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut point = vec![0.0; n];
        match free.as_slice() {
            [j] => {
                for &t in &ts {
                    point[*j] = t;
                    emit(i + 1, &point, i);
                }
            }
            [j, k] => {
                for &s in &ts {
                    for &t in &ts {
                        point[*j] = s;
                        point[*k] = t;
                        emit(i + 1, &point, i);
                    }
                }
            }
            _ => unreachable!("curves restricted to n = 2 or 3"),
        }
    }
    out
}
