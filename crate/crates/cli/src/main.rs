//! `valdist`: value-distribution reports, indicator certificates and
//! property suites for holomorphic curves.
//!
//! Exit codes: 0 when everything is certified and every invariant holds,
//! 1 on usage errors, invalid input or a violated invariant or property,
//! 2 when some report rows are uncertified. The worker count is read from
//! `VALDIST_WORKERS`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod analyze;
mod check;
mod indicator;
mod validate;

#[derive(Parser)]
#[command(name = "valdist", version, about = "Value distribution of holomorphic curves in projective space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-radius report of T, m, m_k, N, N1 and the theorem residuals.
    Analyze(AnalyzeArgs),
    /// Exact asymptotic coefficients and certificates from indicator data.
    Indicator(IndicatorArgs),
    /// Randomised property suites.
    Check(CheckArgs),
    /// Parse curve and hyperplane files and describe them.
    Validate(ValidateArgs),
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Builtin scenario: poly-staircase, airy or exp123.
    #[arg(long, conflicts_with = "curve")]
    scenario: Option<String>,
    /// Curve file (TOML).
    #[arg(long, requires = "planes")]
    curve: Option<PathBuf>,
    /// Hyperplane file (TOML); with --scenario it replaces the builtin system.
    #[arg(long)]
    planes: Option<PathBuf>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    /// Number of log-spaced radii between --rmin and --rmax.
    #[arg(long)]
    radii: Option<usize>,
    /// Explicit radii, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["rmin", "rmax", "radii"])]
    r: Vec<f64>,
    /// Absolute tolerance of every circle mean.
    #[arg(long)]
    tol: Option<f64>,
    /// Minimal working precision in decimal digits.
    #[arg(long)]
    prec: Option<u32>,
    /// Seed for random scenarios.
    #[arg(long, default_value_t = valdist::scenario::DEFAULT_SEED)]
    seed: u64,
    /// Output files; the format follows the extension (.csv or .json).
    #[arg(long, num_args = 1..)]
    out: Vec<PathBuf>,
    /// Print the JSON report instead of the summary table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
pub struct IndicatorArgs {
    /// airy, exp123 or an indicator-family file.
    #[arg(long)]
    family: String,
    /// Also compute the Lemma-2 and Theorem-2 certificates and the
    /// admissible-sum maximum.
    #[arg(long)]
    certify: bool,
    /// Write the certificate as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = valdist::scenario::DEFAULT_SEED)]
    seed: u64,
    /// Sample points per system.
    #[arg(long, default_value_t = 10_000)]
    points: usize,
    /// Random instances for the counting and identity suites.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Working digits of the identity suite.
    #[arg(long, default_value_t = 40)]
    digits: u32,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Additionally require this hyperplane system to be admissible.
    #[arg(long)]
    planes: Option<PathBuf>,
    /// Write the summary (with failing cases) as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    planes: Option<PathBuf>,
}

fn set_workers() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("VALDIST_WORKERS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("VALDIST_WORKERS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let run = || -> anyhow::Result<u8> {
        set_workers()?;
        match cli.command {
            Command::Analyze(a) => analyze::run(a),
            Command::Indicator(a) => indicator::run(a),
            Command::Check(a) => check::run(a),
            Command::Validate(a) => validate::run(a),
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
