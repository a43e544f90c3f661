//! Command-line front end for `omsim-core`: scenario files in, CSV and
//! JSON reports out.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod report;

pub use config::{ConfigError, Diagnostic, Resolved, ScenarioConfig};

/// Exit status for a configuration or usage error.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status when `--strict` turns warnings into a failure.
pub const EXIT_STRICT: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Physics(#[from] omsim_core::Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Physics(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "omsim", version, about = "Optomagnonic whispering-gallery scattering model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to `output.directory` or the current directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 if any warning is raised.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrbitArg {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolarizationArg {
    #[value(name = "te", alias = "TE")]
    Te,
    #[value(name = "tm", alias = "TM")]
    Tm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MagnetizationArg {
    Up,
    Down,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the four-row Brillouin selection table.
    Selection {
        #[command(flatten)]
        common: Common,
        /// Overrides `drive.orbit`.
        #[arg(long, value_enum)]
        orbit: Option<OrbitArg>,
        /// Overrides `drive.input_polarization`.
        #[arg(long, value_enum)]
        polarization: Option<PolarizationArg>,
        /// Overrides `drive.magnetization`.
        #[arg(long, value_enum)]
        magnetization: Option<MagnetizationArg>,
    },
    /// Sweep the laser over the configured grid in both directions.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Cross-correlate two spectrum CSV files.
    Xcorr {
        #[command(flatten)]
        common: Common,
        /// First spectrum; its grid carries the integrals.
        #[arg(long)]
        a: PathBuf,
        /// Second spectrum, interpolated onto the first.
        #[arg(long)]
        b: PathBuf,
        /// Largest |offset|; defaults to half the span of `a`.
        #[arg(long)]
        max_offset_ghz: Option<f64>,
        /// Offset step; defaults to the first grid step of `a`.
        #[arg(long)]
        step_ghz: Option<f64>,
        /// Added to the frequencies of `b` before correlating.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift_b_ghz: f64,
        #[arg(long, default_value_t = 0.05)]
        min_prominence: f64,
    },
    /// Conversion efficiency, optionally with design improvements.
    Efficiency {
        #[command(flatten)]
        common: Common,
        /// Comma-separated stages (triple-resonance, q-limit, disk-volume,
        /// pump-power) or `all`.
        #[arg(long, value_delimiter = ',')]
        improved: Vec<String>,
    },
    /// Check a scenario file without running any physics.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `args`, runs the command, prints diagnostics, and returns the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.strict && !outcome.warnings.is_empty() {
                EXIT_STRICT
            } else {
                0
            }
        }
        Err(e) => {
            match &e {
                CliError::Config(c) => {
                    for d in &c.diagnostics {
                        eprintln!("error: {d}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            e.exit_code()
        }
    }
}
