mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

/// Saturation experiments for linearized shallow ReLU^k networks on the sphere.
#[derive(Debug, Parser)]
#[command(name = "satlab", version)]
pub struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration and timing to standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Activation coefficient table as CSV.
    Coeffs(CoeffsArgs),
    /// Samples of the cutoff and a block symbol as CSV.
    Cutoff(CutoffArgs),
    /// Antipodally quasi-uniform points (CSV) and their uniformity report (JSON).
    Points(PointsArgs),
    /// Dominance certificates for a range of dyadic blocks.
    Qmat(QmatArgs),
    /// Localization profile of one dyadic kernel.
    Localize(LocalizeArgs),
    /// Best approximation of a Sobolev target for one point set.
    Approx(ApproxArgs),
    /// Convergence-rate sweep over a geometric range of n.
    Rate(RateArgs),
    /// Invariant self-checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CutoffArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Samples of `t` on `[0, 4]`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pool_factor: Option<usize>,
    #[arg(long)]
    pub mesh_samples: Option<usize>,
    /// Point CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Uniformity report path; standard error when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QmatArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub q_min: Option<u32>,
    #[arg(long)]
    pub q_max: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for row-major CSV dumps of each block.
    #[arg(long)]
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rcond: Option<f64>,
    #[arg(long)]
    pub restrict_index_set: Option<bool>,
    /// Truncation degree of the target expansion.
    #[arg(long)]
    pub target_degree: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub n_factor: Option<usize>,
    /// Number of seeds, run as `1..=seeds`.
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long)]
    pub restrict_index_set: Option<bool>,
    #[arg(long)]
    pub fit_skip: Option<usize>,
    #[arg(long)]
    pub rcond: Option<f64>,
    #[arg(long)]
    pub target_degree: Option<usize>,
    /// CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Full JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all` or one module name.
    #[arg(long)]
    pub suite: Option<String>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SATLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("SATLAB_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|()| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("satlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
