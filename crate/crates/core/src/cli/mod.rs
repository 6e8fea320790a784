//! Command-line front end.
//!
//! Each subcommand reads one JSON config, writes `<command>.csv`, a gnuplot
//! `<command>.dat` companion and `<command>.json` into `--out`, and maps
//! failures onto a fixed set of exit codes (see [`exit`]).

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::admissibility::AdmissibilityError;
use crate::analysis::AnalysisError;
use crate::hankel::HankelError;
use crate::semilinear::SemilinearError;
use config::*;
use output::{write_json, write_table};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const INVALID_CONFIG: i32 = 2;
    pub const VISCO_ELASTIC_HIGH_ZONE: i32 = 3;
    pub const REGIME_GATE: i32 = 4;
    pub const BLOW_UP: i32 = 10;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn input(e: impl fmt::Display) -> Self {
        Self::new(exit::INVALID_CONFIG, e.to_string())
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::new(exit::IO, format!("{}: {e}", path.display()))
    }

    pub fn from_hankel(e: HankelError) -> Self {
        match e {
            HankelError::ViscoElasticHighZone => Self::new(exit::VISCO_ELASTIC_HIGH_ZONE, e.to_string()),
            other => Self::input(other),
        }
    }

    pub fn from_analysis(e: AnalysisError) -> Self {
        match e {
            AnalysisError::ViscoElasticUnsupported(_) | AnalysisError::GevreyViscoElastic => {
                Self::new(exit::VISCO_ELASTIC_HIGH_ZONE, e.to_string())
            }
            other => Self::input(other),
        }
    }

    pub fn from_admissibility(e: AdmissibilityError) -> Self {
        match e {
            AdmissibilityError::Gate { .. } | AdmissibilityError::MissingS(_) => {
                Self::new(exit::REGIME_GATE, e.to_string())
            }
            other => Self::input(other),
        }
    }

    pub fn from_semilinear(e: SemilinearError) -> Self {
        match e {
            SemilinearError::Admissibility(a) => Self::from_admissibility(a),
            other => Self::input(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sigma-evolve",
    version,
    about = "Decay estimates and experiments for structurally damped sigma-evolution equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for data-parallel kernels.
    #[arg(long, global = true, env = "SIGMA_EVOLVE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Characteristic roots over a list of |xi|.
    Roots,
    /// L1 / Linf norms of the kernels with fitted decay.
    KernelNorms,
    /// Linear evolution of Gaussian data with per-channel decay fits.
    LinearDecay,
    /// Semilinear Duhamel run with the weighted solution norm.
    Semilinear,
    /// Exact admissible range of p for one theorem.
    AdmissibleP,
    /// Gevrey smoothing rate fit.
    Gevrey,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Roots => "roots",
            Command::KernelNorms => "kernel-norms",
            Command::LinearDecay => "linear-decay",
            Command::Semilinear => "semilinear",
            Command::AdmissibleP => "admissible-p",
            Command::Gevrey => "gevrey",
        }
    }
}

/// JSON envelope written by every command: config and seed are echoed verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub command: String,
    pub seed: u64,
    pub config: C,
    pub result: R,
}

fn read_config<C: DeserializeOwned>(path: Option<&Path>) -> Result<C, CliError> {
    let path = path.ok_or_else(|| CliError::input("--config <path> is required"))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn emit<C: Serialize, R: Serialize>(
    out: &Path,
    command: Command,
    seed: u64,
    config: C,
    table: Option<&output::Table>,
    result: R,
) -> Result<(), CliError> {
    let stem = command.name();
    if let Some(table) = table {
        write_table(out, stem, table).map_err(|e| CliError::io(out, e))?;
    }
    let envelope = Envelope {
        command: stem.to_string(),
        seed,
        config,
        result,
    };
    write_json(out, stem, &envelope).map_err(|e| CliError::io(out, e))
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(k) = threads else { return Ok(()) };
    if k == 0 {
        return Err(CliError::input("--threads must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

/// Runs one parsed invocation and returns its exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    configure_threads(cli.threads)?;
    fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    let cfg = cli.config.as_deref();
    let (out, seed, cmd) = (cli.out.as_path(), cli.seed, cli.command);
    match cmd {
        Command::Roots => {
            let c: RootsConfig = read_config(cfg)?;
            let table = commands::cmd_roots(&c)?;
            emit(out, cmd, seed, &c, Some(&table), table.rows.len())?;
        }
        Command::KernelNorms => {
            let c: KernelNormsConfig = read_config(cfg)?;
            let (table, report) = commands::cmd_kernel_norms(&c)?;
            emit(out, cmd, seed, &c, Some(&table), &report)?;
        }
        Command::LinearDecay => {
            let c: LinearDecayConfig = read_config(cfg)?;
            let (table, report) = commands::cmd_linear_decay(&c)?;
            emit(out, cmd, seed, &c, Some(&table), &report)?;
        }
        Command::Semilinear => {
            let c: SemilinearConfig = read_config(cfg)?;
            let (table, report) = commands::cmd_semilinear(&c, seed)?;
            emit(out, cmd, seed, &c, Some(&table), &report)?;
            if report.run.blow_up {
                return Ok(exit::BLOW_UP);
            }
        }
        Command::AdmissibleP => {
            let c: AdmissiblePConfig = read_config(cfg)?;
            let report = commands::cmd_admissible_p(&c)?;
            emit(out, cmd, seed, &c, None, &report)?;
        }
        Command::Gevrey => {
            let c: GevreyConfig = read_config(cfg)?;
            let (table, fit) = commands::cmd_gevrey(&c)?;
            emit(out, cmd, seed, &c, Some(&table), fit)?;
        }
    }
    Ok(exit::OK)
}

/// Parses `args`, runs, prints errors to stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::INVALID_CONFIG } else { exit::OK };
        }
    };
    match execute(&cli) {
        Ok(code) => {
            if code == exit::BLOW_UP {
                eprintln!("blow-up detected; outputs written to {}", cli.out.display());
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
