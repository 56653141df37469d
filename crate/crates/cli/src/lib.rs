//! Batch front-end for `spd-median`: reads a JSON dataset, runs an estimator,
//! the property checks or the outlier study, and writes a deterministic
//! JSON or CSV report.
//!
//! Exit codes: 0 success, 1 a property check failed, 2 input or usage error,
//! 3 an estimator did not converge.

pub mod check;
pub mod dataset;
pub mod lcg;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use spd_median::estimators::{karcher_mean, outlier_displacement_study, p_minimizer, riemannian_median};
use spd_median::geometry::distance;
use spd_median::{ContinuationConfig, Error as CoreError, SymMatrix, TangentVector};
use thiserror::Error;

use dataset::{parse_dataset, parse_weight_list, DatasetError, DatasetFile, DEFAULT_SYM_TOL};
use report::{emit_report, ConfigEcho, Format, RunReport, StudyRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spd-median", version, about = "Riemannian median and Karcher mean of SPD matrices")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Dataset file (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Comma-separated weights overriding the dataset's.
    #[arg(long, global = true, value_name = "W1,W2,...")]
    pub weights_inline: Option<String>,
    #[arg(long, global = true)]
    pub grad_tol: Option<f64>,
    #[arg(long, global = true)]
    pub cont_tol: Option<f64>,
    #[arg(long, global = true)]
    pub p_start: Option<f64>,
    #[arg(long, global = true)]
    pub p_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Seed for the random congruence used by `check`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to csv for `outlier-study`, json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Absolute symmetry tolerance for dataset matrices.
    #[arg(long, global = true)]
    pub sym_tol: Option<f64>,
    /// Record wall-clock time in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Riemannian median by p-continuation.
    Median,
    /// Karcher (Fréchet) mean.
    Karcher,
    /// Minimizer of Σ w_k δ(X, A_k)^p for 1 < p ≤ 2.
    Mp {
        #[arg(long)]
        p: f64,
    },
    /// Distance between two dataset matrices.
    Distance {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    /// Property suite on the dataset.
    Check,
    /// Displacement of median and mean as one outlier moves away.
    OutlierStudy {
        /// JSON file `{"d": .., "matrix": [row-major symmetric]}`.
        #[arg(long)]
        direction: PathBuf,
        /// Comma-separated ascending distances.
        #[arg(long, value_delimiter = ',', required = true)]
        distances: Vec<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Median => "median",
            Command::Karcher => "karcher",
            Command::Mp { .. } => "mp",
            Command::Distance { .. } => "distance",
            Command::Check => "check",
            Command::OutlierStudy { .. } => "outlier-study",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write report: {0}")]
    Output(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::NoConvergence) => EXIT_NO_CONVERGENCE,
            _ => EXIT_INPUT,
        }
    }
}

/// Parses `args` (including the program name), runs the command, emits the
/// report and returns the process exit code. Diagnostics go to standard error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let format = cli.opts.format.unwrap_or(match cli.command {
                Command::OutlierStudy { .. } => Format::Csv,
                _ => Format::Json,
            });
            if let Err(e) = emit_report(&report, format, cli.opts.output.as_deref()) {
                eprintln!("error: {}", CliError::Output(e));
                return EXIT_INPUT;
            }
            exit_code_for(&report)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn exit_code_for(report: &RunReport) -> i32 {
    if report.checks_failed() {
        EXIT_CHECK_FAILED
    } else if report.converged == Some(false) {
        eprintln!("error: {} did not converge", report.estimator.as_deref().unwrap_or(&report.command));
        EXIT_NO_CONVERGENCE
    } else {
        EXIT_OK
    }
}

/// Runs the parsed command and builds its report without emitting it.
pub fn execute(cli: &Cli) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let opts = &cli.opts;
    let cfg = continuation_config(opts)?;
    let ds = load_dataset(opts)?;
    let tuple = ds.tuple();
    let mut report = RunReport::new(cli.command.name(), ds.name.clone(), ConfigEcho::new(&cfg, opts.seed));

    match &cli.command {
        Command::Median => {
            let r = riemannian_median(&tuple, &cfg)?;
            report = report.with_estimate("riemannian_median", &r);
        }
        Command::Karcher => {
            let r = karcher_mean(&tuple, &cfg.inner)?;
            report = report.with_estimate("karcher_mean", &r);
        }
        Command::Mp { p } => {
            report.config.p = Some(*p);
            let r = p_minimizer(&tuple, *p, &cfg.inner, None)?;
            report = report.with_estimate("p_minimizer", &r);
        }
        Command::Distance { a, b } => {
            let n = ds.matrices.len();
            let get = |i: usize| {
                ds.matrices
                    .get(i)
                    .ok_or_else(|| CliError::Usage(format!("matrix index {i} out of range (dataset has {n})")))
            };
            report.estimator = Some("distance".into());
            report.value = Some(distance(get(*a)?, get(*b)?)?);
        }
        Command::Check => {
            let outcome = check::run_checks(&ds, &cfg, opts.seed)?;
            report = report.with_estimate("riemannian_median", &outcome.median);
            report.checks = outcome.checks;
        }
        Command::OutlierStudy { direction, distances } => {
            let h = load_direction(direction, ds.d, opts.sym_tol.unwrap_or(DEFAULT_SYM_TOL))?;
            let dir = TangentVector::new(ds.matrices[0].clone(), h)?;
            let rows = outlier_displacement_study(&tuple, &dir, distances, &cfg)?;
            report.estimator = Some("outlier_displacement_study".into());
            report.study = rows
                .iter()
                .map(|r| StudyRow {
                    t: r.t,
                    median_displacement: r.median_displacement,
                    karcher_displacement: r.karcher_displacement,
                })
                .collect();
        }
    }
    if opts.timing {
        report.wall_clock_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

pub fn continuation_config(opts: &GlobalOpts) -> Result<ContinuationConfig, CliError> {
    let mut cfg = ContinuationConfig::default();
    if let Some(v) = opts.grad_tol {
        cfg.inner.grad_tol = v;
    }
    if let Some(v) = opts.max_iter {
        cfg.inner.max_iter = v;
    }
    if let Some(v) = opts.cont_tol {
        cfg.cont_tol = v;
    }
    if let Some(v) = opts.p_start {
        cfg.p_start = v;
    }
    if let Some(v) = opts.p_ratio {
        cfg.p_ratio = v;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn load_dataset(opts: &GlobalOpts) -> Result<DatasetFile, CliError> {
    let path = opts.input.as_deref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let mut ds = parse_dataset(path, opts.sym_tol.unwrap_or(DEFAULT_SYM_TOL))?;
    if let Some(w) = &opts.weights_inline {
        ds.set_weights(&parse_weight_list(w)?)?;
    }
    Ok(ds)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectionFile {
    d: usize,
    matrix: Vec<f64>,
}

fn load_direction(path: &Path, d: usize, sym_tol: f64) -> Result<SymMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| DatasetError::Io { path: path.to_owned(), source })?;
    let raw: DirectionFile =
        serde_json::from_str(&text).map_err(|e| DatasetError::Parse(format!("direction file: {e}")))?;
    if raw.d != d || raw.matrix.len() != d * d {
        return Err(CliError::Usage(format!("direction must be a {d}x{d} matrix")));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if (raw.matrix[i * d + j] - raw.matrix[j * d + i]).abs() > sym_tol {
                return Err(CliError::Usage("direction matrix is not symmetric".into()));
            }
        }
    }
    Ok(SymMatrix::from_row_major(d, &raw.matrix)?)
}

