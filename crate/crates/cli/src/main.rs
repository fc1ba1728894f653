//! `taulab` command-line frontend.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 enclosure failure,
//! 4 internal invariant breach.

mod commands;
mod grid;
mod table;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TGrid {
    /// Arithmetic grid `start:stop:step`, stop included.
    #[arg(long = "t-grid", conflicts_with = "t_list")]
    pub t_grid: Option<String>,
    /// Comma-separated list of t values.
    #[arg(long = "t-list")]
    pub t_list: Option<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "taulab",
    version,
    about = "Enclosures for characteristic functions, quantile transforms and d_a metrics"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic function of a measure or of mu_a over a t-grid.
    Charfn {
        /// Measure or parameter-sequence document.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        t: TGrid,
        /// Product truncation index; chosen per t when absent.
        #[arg(long = "trunc-N")]
        trunc_n: Option<usize>,
        /// Also emit an empirical characteristic function from this many samples.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "depth-D", default_value_t = taulab::product_measures::DEFAULT_DEPTH)]
        depth_d: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// d_a(2^m, 0), its dyadic series and two-sided bounds over an m-range.
    Metric {
        /// Parameter-sequence document.
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "m-min", default_value_t = 0)]
        m_min: usize,
        #[arg(long = "m-max")]
        m_max: usize,
        /// Series terms for the enclosures.
        #[arg(long = "trunc-N", default_value_t = taulab::tau_metrics::DEFAULT_DYADIC_TERMS)]
        trunc_n: usize,
        /// Number of explicit terms in the two-sided bounds.
        #[arg(long = "bound-terms", default_value_t = 4)]
        bound_terms: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Separation witness between d_a and d_b plus dyadic null reports.
    Separate {
        /// Parameter sequence a.
        #[arg(long)]
        input: PathBuf,
        /// Parameter sequence b.
        #[arg(long = "input-b")]
        input_b: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Last dyadic exponent scanned.
        #[arg(long = "m-max")]
        m_max: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Runs the invariant suite; exit 0 iff every check passes.
    Validate {
        /// Inject a deliberate defect (faw-swap, shrunk-bracket).
        #[arg(long = "inject-fault")]
        inject_fault: Vec<taulab::suite::Fault>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Characteristic functions of w * eta0 + (1 - w) * eta1 and decay
    /// profiles of eta1.
    Interpolate {
        /// Measure eta0.
        #[arg(long)]
        input: PathBuf,
        /// Measure eta1.
        #[arg(long = "input-b")]
        input_b: PathBuf,
        /// Weights as `start:stop:step`.
        #[arg(long = "w-grid", default_value = "0:1:0.25")]
        w_grid: String,
        #[command(flatten)]
        t: TGrid,
        /// Decay bands `lo:hi,...`.
        #[arg(long)]
        bands: Option<String>,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match commands::run(config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("taulab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
