//! `ustep`: structure raw log lines into templates from the command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
//! 3 corrupt snapshot.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ustep_core::eval::EvalError;
use ustep_core::{ConfigError, SnapshotError};

#[derive(Debug, Parser)]
#[command(name = "ustep", version, about = "Online log template mining with an evolving search tree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse raw log lines, one JSON object per line on stdout.
    Parse {
        /// Raw log file, or `-` for standard input.
        #[arg(long, default_value = "-")]
        input: String,
        #[command(flatten)]
        miner: MinerArgs,
        /// Resume from a snapshot (its configuration replaces the miner flags).
        #[arg(long)]
        snapshot_in: Option<PathBuf>,
        /// Write the final miner state here.
        #[arg(long)]
        snapshot_out: Option<PathBuf>,
    },
    /// Score and time the miner on a labeled CSV (LineId, Content, EventId).
    Bench {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        miner: MinerArgs,
        #[arg(long, default_value_t = 1000)]
        chunk_size: usize,
        /// Also write the per-chunk timing CSV to this path.
        #[arg(long)]
        timing_csv: Option<PathBuf>,
        /// `json` prints both reports, `csv` prints the timing CSV.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Dataset name used in reports (defaults to the file stem).
        #[arg(long)]
        name: Option<String>,
    },
    /// Run a labeled CSV once per (sigma, phi) grid point and report the best.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        /// Grid file: one `sigma,phi` pair per line.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        masks: Option<PathBuf>,
        #[arg(long)]
        strict_sim: bool,
        /// `json` prints the best point and all results, `csv` prints the grid table.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write the grid table as CSV to this path.
        #[arg(long)]
        results_out: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
    },
    /// Print statistics and templates stored in a snapshot.
    Stats {
        #[arg(long)]
        snapshot_in: PathBuf,
    },
}

#[derive(Debug, Args)]
struct MinerArgs {
    /// Similarity threshold in [0, 1] [default: 0.5]
    #[arg(long)]
    sigma: Option<f64>,
    /// Templates per leaf before splitting, at least 1 [default: 8]
    #[arg(long)]
    phi: Option<usize>,
    /// Count template wildcards as mismatches when comparing.
    #[arg(long)]
    strict_sim: bool,
    /// Mask rules file: one regex per line, `#` comments.
    #[arg(long)]
    masks: Option<PathBuf>,
}

impl MinerArgs {
    fn any_set(&self) -> bool {
        self.sigma.is_some() || self.phi.is_some() || self.strict_sim || self.masks.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Snapshot(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Snapshot(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Snapshot(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SnapshotError> for CliError {
    fn from(e: SnapshotError) -> Self {
        match e {
            SnapshotError::Io(io) => CliError::Io(format!("snapshot: {io}")),
            other => CliError::Snapshot(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Config(c) => c.into(),
            EvalError::Grid(_) | EvalError::Empty | EvalError::LengthMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Io(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ustep: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
