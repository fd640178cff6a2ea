//! `dgg`: command-line front end for the Double GG channel model.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "dgg",
    version,
    about = "Double Generalized Gamma FSO channel: parameters, densities, link performance, Monte Carlo and fitting"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Channel configuration file (flat `key = value`)
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Use a built-in channel instead of a config file
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Write output here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo and noise seed
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo sample count
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// Move the channel onto exact rational pairs so closed forms apply
    #[arg(long, global = true)]
    snap: bool,
    /// Centering of the log-irradiance axis
    #[arg(long, global = true, value_enum, default_value_t = Convention::Mean)]
    convention: Convention,
    /// Output format; tables default to csv, reports to json
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    /// x = (ln I − E[ln I])/σ
    Mean,
    /// x = (ln I + σ²/2)/σ
    Halfvar,
}

/// Evaluation path for performance metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    /// closed form when exact and within the order cap, else quadrature
    Auto,
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    Outage,
    BerSiso,
    BerSimo,
    BerAsymptotic,
}

#[derive(Debug, Args)]
struct Grid {
    /// Smallest irradiance (or x on the log axis)
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    /// Largest irradiance (or x on the log axis)
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Linear rather than logarithmic irradiance spacing
    #[arg(long)]
    linear: bool,
    /// Evaluate through the Meijer G closed form instead of quadrature
    #[arg(long)]
    meijer: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the channel parameters as JSON
    Params,
    /// Density of the irradiance, or of the scaled log-irradiance with --log-axis
    Pdf {
        #[command(flatten)]
        grid: Grid,
        /// Emit the `x,f` log-irradiance curve used by `fit`
        #[arg(long)]
        log_axis: bool,
        /// Multiplicative Gaussian noise level on the log-axis curve
        #[arg(long, default_value_t = 0.0, requires = "log_axis")]
        noise: f64,
    },
    /// Cumulative distribution of the irradiance
    Cdf {
        #[command(flatten)]
        grid: Grid,
    },
    /// Outage probability at the given average SNRs
    Outage {
        /// Average SNRs in dB (comma-separated or repeated)
        #[arg(long = "snr-db", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        snr_db: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        threshold_db: f64,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
    },
    /// Average BER (SISO, or SIMO when the config has several apertures)
    Ber {
        #[arg(long = "snr-db", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        snr_db: Vec<f64>,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
        /// High-SNR asymptote instead of the exact value
        #[arg(long)]
        asymptotic: bool,
    },
    /// Analytical values next to Monte Carlo estimates
    Simulate {
        #[arg(long = "snr-db", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        snr_db: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        threshold_db: f64,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
    },
    /// A metric over an SNR range, optionally with a Monte Carlo overlay
    Sweep {
        #[arg(long, value_enum)]
        metric: Metric,
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        threshold_db: f64,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
        /// Add mc_mean and mc_stderr columns
        #[arg(long)]
        mc: bool,
    },
    /// Fit candidate models to an `x,f` log-irradiance curve
    Fit {
        /// CSV file with header `x,f`
        #[arg(long)]
        data: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
