//! The `optrec` command-line front end.
//!
//! A problem file is a JSON object tagged by `"problem"`:
//!
//! ```json
//! {"problem": "recovery",
//!  "class": {"weights": {"prefix": [1, 0.5, 0.25]}, "q": 1},
//!  "info": {"kind": "coordinatewise", "eps": [0.1, 0.2, 0.7]}}
//! ```
//!
//! `"scalar"` files carry a pair class and a product information model,
//! `"fourier"` files carry `mu`, `p` and an optional `eps` list. Recovery and
//! scalar files may add `method` (multipliers to certify instead of the
//! optimal ones) and `oracle` (an [`OracleConfig`]).
//!
//! Exit codes: 0 success, 1 failed certification, 2 schema violation,
//! 3 solver error.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify::{verify, verify_method, OracleConfig, Problem};
use crate::error::Error;
use crate::fourier::{asymptotic_constants, empirical_limit};
use crate::recovery::{apply_method, breakpoints_c, solve, InfoModel, RecoverySolution};
use crate::scalar::{
    breakpoints_d, sp_apply, sp_solve, PairClassSpec, ScalarInfoModel, ScalarSolution,
};
use crate::serde_ext::extended_f64;
use crate::weights::ClassSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Number of breakpoints printed when the window does not fix it.
const DEFAULT_BREAKPOINT_COUNT: usize = 16;

#[derive(Debug, Parser)]
#[command(
    name = "optrec",
    version,
    about = "Optimal recovery from inexact information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Io {
    /// Problem file, `-` for stdin.
    #[arg(long)]
    spec: String,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Grid {
    #[arg(long = "eps-min", default_value_t = 1e-4)]
    eps_min: f64,
    #[arg(long = "eps-max", default_value_t = 1.0)]
    eps_max: f64,
    #[arg(long = "eps-count", default_value_t = 25)]
    eps_count: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal error and method as JSON.
    Error {
        #[command(flatten)]
        io: Io,
    },
    /// Applies the optimal method to observations.
    Method {
        #[command(flatten)]
        io: Io,
        /// JSON observations: an array for recovery, `{"a": [..], "b": [..]}`
        /// for scalar products; entries are reals or `[re, im]` pairs.
        #[arg(long)]
        observations: PathBuf,
    },
    /// Breakpoints `c_m` (recovery) or `d_m` (scalar products).
    Breakpoints {
        #[command(flatten)]
        io: Io,
        /// How many breakpoints to print for full-sequence information.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Certificate and brute-force oracle check.
    Certify {
        #[command(flatten)]
        io: Io,
        /// Oracle grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// `eps,error` CSV over a logarithmic grid.
    Sweep {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        grid: Grid,
    },
    /// `eps,E,ratio,constant` CSV for a Fourier problem.
    Asymptotics {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        grid: Grid,
    },
}

/// Contents of a `--spec` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemFile {
    Recovery {
        class: ClassSpec,
        info: InfoModel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        method: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        oracle: Option<OracleConfig>,
    },
    Scalar {
        class: PairClassSpec,
        info: ScalarInfoModel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        method: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        oracle: Option<OracleConfig>,
    },
    Fourier {
        mu: f64,
        #[serde(with = "extended_f64")]
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<Vec<f64>>,
    },
}

impl ProblemFile {
    /// Range checks run before any solver is called.
    pub fn validate(&self) -> crate::Result<()> {
        match self {
            ProblemFile::Recovery {
                class,
                info,
                oracle,
                ..
            } => {
                class.validate()?;
                info.validate()?;
                oracle.map_or(Ok(()), |o| o.validate())
            }
            ProblemFile::Scalar {
                class,
                info,
                oracle,
                ..
            } => {
                class.validate()?;
                info.validate()?;
                oracle.map_or(Ok(()), |o| o.validate())
            }
            ProblemFile::Fourier { mu, p, eps } => {
                asymptotic_constants(*mu, *p)?;
                match eps {
                    Some(list) if list.iter().any(|e| !(e.is_finite() && *e > 0.0)) => {
                        Err(Error::InvalidInfo("eps entries must be positive".into()))
                    }
                    _ => Ok(()),
                }
            }
        }
    }

    fn problem(&self) -> Option<Problem> {
        match self {
            ProblemFile::Recovery { class, info, .. } => Some(Problem::Recovery {
                class: class.clone(),
                info: info.clone(),
            }),
            ProblemFile::Scalar { class, info, .. } => Some(Problem::Scalar {
                class: class.clone(),
                info: info.clone(),
            }),
            ProblemFile::Fourier { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observations {
    Sequence(Values),
    Pair { a: Values, b: Values },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Solution {
    // tried first: its `products` field tells the two apart
    Scalar(ScalarSolution),
    Recovery(RecoverySolution),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Estimate {
    Real(f64),
    Complex(Complex64),
    Sequence(Values),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutput {
    pub solution: Solution,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointsOutput {
    /// `"c"` or `"d"`.
    pub kind: String,
    pub values: Vec<f64>,
}

/// A failure together with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn schema(message: impl ToString) -> Self {
        Failure {
            code: EXIT_SCHEMA,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_SOLVER,
            message: e.to_string(),
        }
    }
}

/// Runs the CLI on process arguments and standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdin(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

/// Like [`run`] with explicit streams.
pub fn run_with<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let io = match &cli.command {
        Command::Error { io }
        | Command::Method { io, .. }
        | Command::Breakpoints { io, .. }
        | Command::Certify { io, .. }
        | Command::Sweep { io, .. }
        | Command::Asymptotics { io, .. } => io,
    };
    let result = read_spec(&io.spec, stdin).and_then(|file| dispatch(&cli.command, &file));
    match result {
        Ok((text, code)) => {
            let written = match &io.out {
                Some(path) => fs::write(path, &text).map_err(|e| e.to_string()),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "optrec: cannot write output: {e}");
                    EXIT_SOLVER
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "optrec: {}", f.message);
            f.code
        }
    }
}

fn read_spec(spec: &str, stdin: &mut dyn Read) -> Result<ProblemFile, Failure> {
    let text = if spec == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(Failure::schema)?;
        s
    } else {
        fs::read_to_string(spec).map_err(|e| Failure::schema(format!("{spec}: {e}")))?
    };
    let file: ProblemFile = serde_json::from_str(&text).map_err(Failure::schema)?;
    file.validate().map_err(Failure::schema)?;
    Ok(file)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn solution(file: &ProblemFile) -> Result<Solution, Failure> {
    match file {
        ProblemFile::Recovery { class, info, .. } => Ok(Solution::Recovery(solve(class, info)?)),
        ProblemFile::Scalar { class, info, .. } => Ok(Solution::Scalar(sp_solve(class, info)?)),
        ProblemFile::Fourier { .. } => {
            Err(Failure::schema("expected a recovery or scalar problem"))
        }
    }
}

fn dispatch(command: &Command, file: &ProblemFile) -> Result<(String, i32), Failure> {
    let ok = |text: String| Ok((text, EXIT_OK));
    match command {
        Command::Error { .. } => ok(json(&solution(file)?)),
        Command::Method { observations, .. } => {
            let text = fs::read_to_string(observations)
                .map_err(|e| Failure::schema(format!("{}: {e}", observations.display())))?;
            let obs: Observations = serde_json::from_str(&text).map_err(Failure::schema)?;
            let solution = solution(file)?;
            let estimate = estimate(&solution, obs)?;
            ok(json(&MethodOutput { solution, estimate }))
        }
        Command::Breakpoints { count, .. } => ok(json(&breakpoints(file, *count)?)),
        Command::Certify { grid, .. } => {
            let (problem, method, oracle) = match file {
                ProblemFile::Recovery { method, oracle, .. }
                | ProblemFile::Scalar { method, oracle, .. } => {
                    (file.problem().expect("recovery or scalar"), method, oracle)
                }
                ProblemFile::Fourier { .. } => {
                    return Err(Failure::schema(
                        "certify needs a recovery or scalar problem",
                    ))
                }
            };
            let mut cfg = oracle.unwrap_or_default();
            if let Some(g) = grid {
                cfg.grid_points_per_axis = *g;
            }
            cfg.validate().map_err(Failure::schema)?;
            let report = match method {
                Some(m) => verify_method(&problem, m, &cfg)?,
                None => verify(&problem, &cfg)?,
            };
            let code = if report.pass {
                EXIT_OK
            } else {
                EXIT_CERTIFICATION
            };
            Ok((json(&report), code))
        }
        Command::Sweep { grid, .. } => {
            let mut out = String::from("eps,error\n");
            for eps in log_grid(grid)? {
                let error = match file {
                    ProblemFile::Recovery { class, info, .. } => {
                        solve(class, &with_eps(info, eps))?.error
                    }
                    ProblemFile::Scalar { class, info, .. } => {
                        sp_solve(class, &with_scalar_eps(info, eps))?.error
                    }
                    ProblemFile::Fourier { .. } => {
                        return Err(Failure::schema("sweep needs a recovery or scalar problem"))
                    }
                };
                out.push_str(&format!("{eps:?},{error:?}\n"));
            }
            ok(out)
        }
        Command::Asymptotics { grid, .. } => {
            let ProblemFile::Fourier { mu, p, eps } = file else {
                return Err(Failure::schema("asymptotics needs a fourier problem"));
            };
            let eps = match eps {
                Some(list) => list.clone(),
                None => {
                    let mut list = log_grid(grid)?;
                    list.reverse();
                    list
                }
            };
            let constant = asymptotic_constants(*mu, *p)?.constant;
            let lambda = asymptotic_constants(*mu, *p)?.lambda_exp;
            let ratios = empirical_limit(*mu, *p, &eps).map_err(|e| match e {
                Error::InvalidInfo(_) => Failure::schema(e),
                e => e.into(),
            })?;
            let mut out = String::from("eps,E,ratio,constant\n");
            for (eps, ratio) in eps.iter().zip(ratios) {
                let error = ratio * eps.powf(lambda);
                out.push_str(&format!("{eps:?},{error:?},{ratio:?},{constant:?}\n"));
            }
            ok(out)
        }
    }
}

/// `count` log-spaced points from `eps_min` to `eps_max`, ascending.
fn log_grid(grid: &Grid) -> Result<Vec<f64>, Failure> {
    let Grid {
        eps_min,
        eps_max,
        eps_count,
    } = *grid;
    if !(eps_min > 0.0 && eps_max >= eps_min && eps_max.is_finite() && eps_count >= 1) {
        return Err(Failure::schema(format!(
            "need 0 < eps-min <= eps-max < inf and eps-count >= 1, got {eps_min}, {eps_max}, {eps_count}"
        )));
    }
    if eps_count == 1 {
        return Ok(vec![eps_min]);
    }
    let (lo, hi) = (eps_min.ln(), eps_max.ln());
    Ok((0..eps_count)
        .map(|i| match i {
            0 => eps_min,
            i if i == eps_count - 1 => eps_max,
            i => (lo + (hi - lo) * i as f64 / (eps_count - 1) as f64).exp(),
        })
        .collect())
}

fn with_eps(info: &InfoModel, eps: f64) -> InfoModel {
    match info {
        InfoModel::Coordinatewise { eps: e } => InfoModel::Coordinatewise {
            eps: vec![eps; e.len()],
        },
        InfoModel::FiniteBall { n, p, .. } => InfoModel::FiniteBall { n: *n, eps, p: *p },
        InfoModel::FullBall { p, .. } => InfoModel::FullBall { eps, p: *p },
    }
}

fn with_scalar_eps(info: &ScalarInfoModel, eps: f64) -> ScalarInfoModel {
    match info {
        ScalarInfoModel::Coordinatewise { eps: e } => ScalarInfoModel::Coordinatewise {
            eps: vec![eps; e.len()],
        },
        ScalarInfoModel::ProductBall { n, r, .. } => {
            ScalarInfoModel::ProductBall { n: *n, eps, r: *r }
        }
    }
}

fn breakpoints(file: &ProblemFile, count: Option<usize>) -> Result<BreakpointsOutput, Failure> {
    match file {
        ProblemFile::Recovery { class, info, .. } => {
            let (n, p) = match info {
                InfoModel::FiniteBall { n, p, .. } => (*n, *p),
                InfoModel::FullBall { p, .. } => (
                    class
                        .weights
                        .support_len()
                        .unwrap_or(DEFAULT_BREAKPOINT_COUNT),
                    *p,
                ),
                InfoModel::Coordinatewise { .. } => {
                    return Err(Failure::schema("breakpoints need ball information"))
                }
            };
            Ok(BreakpointsOutput {
                kind: "c".into(),
                values: breakpoints_c(class, p, count.unwrap_or(n))?,
            })
        }
        ProblemFile::Scalar { class, info, .. } => {
            let ScalarInfoModel::ProductBall { n, r, .. } = info else {
                return Err(Failure::schema("breakpoints need ball information"));
            };
            Ok(BreakpointsOutput {
                kind: "d".into(),
                values: breakpoints_d(class, *r, count.unwrap_or(*n))?,
            })
        }
        ProblemFile::Fourier { .. } => Err(Failure::schema(
            "breakpoints need a recovery or scalar problem",
        )),
    }
}

fn estimate(solution: &Solution, obs: Observations) -> Result<Estimate, Failure> {
    match (solution, obs) {
        (Solution::Recovery(sol), Observations::Sequence(values)) => {
            Ok(Estimate::Sequence(match values {
                Values::Real(v) => Values::Real(apply_method(sol, &v)?),
                Values::Complex(v) => Values::Complex(apply_method(sol, &v)?),
            }))
        }
        (Solution::Scalar(sol), Observations::Pair { a, b }) => match (a, b) {
            (Values::Real(a), Values::Real(b)) => Ok(Estimate::Real(sp_apply(sol, &a, &b)?)),
            (a, b) => Ok(Estimate::Complex(sp_apply(sol, &complex(a), &complex(b))?)),
        },
        (Solution::Recovery(_), _) => {
            Err(Failure::schema("recovery observations must be an array"))
        }
        (Solution::Scalar(_), _) => Err(Failure::schema(
            "scalar observations must be {\"a\": [..], \"b\": [..]}",
        )),
    }
}

fn complex(values: Values) -> Vec<Complex64> {
    match values {
        Values::Real(v) => v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        Values::Complex(v) => v,
    }
}
