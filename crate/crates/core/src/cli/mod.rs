//! The `fracsym` command line.
//!
//! Settings are layered: built-in defaults, then an optional `key=value`
//! config file (`--config`), then flags. Every subcommand writes one CSV or
//! JSON file and prints a one-line summary on stdout.

mod commands;
mod config;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};

pub use commands::run_subcommand;
pub use config::{OutputFormat, RunConfig, KEYS, OUTPUT_DIR_ENV};

use crate::error::Error;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ClapSubcommand)]
pub enum Subcommand {
    /// Sample the kernel W and tabulate its moments.
    Density,
    /// Apply S_n to the target on a grid over [-a, a].
    Approx,
    /// Tabulate ω(f, 1/n) and ω₂(f, 1/n) over the n list.
    Moduli,
    /// Sweep n and fit the log-log convergence rate.
    Converge,
    /// Check |S_n f − S_n g| <= max |f − g| over seeded piecewise-linear pairs.
    Stability,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Density => "density",
            Subcommand::Approx => "approx",
            Subcommand::Moduli => "moduli",
            Subcommand::Converge => "converge",
            Subcommand::Stability => "stability",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracsym", version, about = "Fractional symmetrized neural network operators")]
struct Cli {
    #[command(subcommand)]
    command: Subcommand,
    #[command(flatten)]
    flags: Flags,
}

/// Flags mirror the config keys. Values stay textual here so that flag and
/// config-file values go through one validation path.
#[derive(Debug, Default, Args)]
struct Flags {
    /// key=value config file applied before the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// deformation base q (> 0, != 1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,
    /// steepness θ (> 0)
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// fractional exponent α in (0, 1]
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// auxiliary scale A (> 0)
    #[arg(long, global = true, allow_hyphen_values = true)]
    scale: Option<String>,
    /// activation form: sigmoid or literal
    #[arg(long, global = true)]
    mode: Option<String>,
    /// sampling density n
    #[arg(long, global = true, allow_hyphen_values = true)]
    n: Option<String>,
    /// comma-separated, strictly increasing n values
    #[arg(long = "n-list", global = true)]
    n_list: Option<String>,
    /// truncation tolerance
    #[arg(long, global = true, allow_hyphen_values = true)]
    eps: Option<String>,
    /// raw or renormalized
    #[arg(long = "eval-mode", global = true)]
    eval_mode: Option<String>,
    /// clamp, zero or none
    #[arg(long, global = true)]
    extension: Option<String>,
    /// target function, `name` or `name:p1,p2,...`
    #[arg(long = "fn", global = true)]
    target: Option<String>,
    /// domain half-width a
    #[arg(long = "half-width", global = true, allow_hyphen_values = true)]
    half_width: Option<String>,
    /// number of grid points
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// number of function pairs for `stability`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pairs: Option<String>,
    /// record wall times in `converge` output (breaks byte-identical reruns)
    #[arg(long, global = true)]
    timing: Option<String>,
    /// output file
    #[arg(long, global = true)]
    out: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
}

impl Flags {
    fn settings(&self) -> Vec<(&'static str, &str)> {
        let fields: [(&'static str, &Option<String>); 17] = [
            ("q", &self.q),
            ("theta", &self.theta),
            ("alpha", &self.alpha),
            ("scale", &self.scale),
            ("mode", &self.mode),
            ("n", &self.n),
            ("n-list", &self.n_list),
            ("eps", &self.eps),
            ("eval-mode", &self.eval_mode),
            ("extension", &self.extension),
            ("fn", &self.target),
            ("half-width", &self.half_width),
            ("grid", &self.grid),
            ("pairs", &self.pairs),
            ("timing", &self.timing),
            ("out", &self.out),
            ("format", &self.format),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }
}

/// Parse arguments (including the program name) into a subcommand and a
/// validated configuration.
pub fn parse_config<I, T>(argv: I) -> Result<(Subcommand, RunConfig), ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ParseOutcome::Clap)?;
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ParseOutcome::Error(CliError::Io(format!("cannot read config {}: {e}", path.display()))))?;
        cfg.apply_config_text(&text)
            .map_err(|e| ParseOutcome::Error(CliError::Validation(format!("{}: {e}", path.display()))))?;
    }
    for (key, value) in cli.flags.settings() {
        cfg.set(key, value).map_err(|e| ParseOutcome::Error(e.into()))?;
    }
    cfg.validate().map_err(|e| ParseOutcome::Error(e.into()))?;
    Ok((cli.command, cfg))
}

#[derive(Debug)]
pub enum ParseOutcome {
    /// Help, version or a malformed command line, as reported by clap.
    Clap(clap::Error),
    Error(CliError),
}

/// Entry point of the binary.
pub fn run_main<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (command, cfg) = match parse_config(argv) {
        Ok(parsed) => parsed,
        Err(ParseOutcome::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
        Err(ParseOutcome::Error(e)) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match run_subcommand(command, &cfg) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
