//! Scoring a miner against labeled corpora: parsing accuracy, throughput
//! curves, robustness statistics and hyperparameter sweeps.

mod accuracy;
mod dataset;
mod robustness;
mod sweep;
mod throughput;

use thiserror::Error;

pub use accuracy::{grouping_accuracy, parsing_accuracy, GroupDetail, GroupingReport};
pub use dataset::{load_labeled_dataset, read_labeled_dataset, read_raw_lines, LabeledRecord};
pub use robustness::{quantile_inclusive, robustness_stats, RobustnessReport};
pub use sweep::{grid_product, parse_grid, sweep, GridPoint, SweepReport, SweepResult};
pub use throughput::{throughput_bench, BenchRun, ChunkTiming, ThroughputReport};

use crate::error::ConfigError;
use crate::miner::MinerConfig;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("dataset is missing required column {0:?}")]
    MissingColumn(String),
    #[error("bad record at line id {line_id}: {reason}")]
    BadRecord { line_id: u64, reason: String },
    #[error("{records} records but {predicted} predictions")]
    LengthMismatch { records: usize, predicted: usize },
    #[error("no values to summarize")]
    Empty,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// A timed run over a labeled dataset together with its accuracy.
#[derive(Clone, Debug)]
pub struct DatasetRun {
    pub grouping: GroupingReport,
    pub bench: BenchRun,
}

/// Runs a fresh miner over the `Content` column in order, timing it in
/// chunks, and scores the resulting grouping.
pub fn evaluate_dataset(
    dataset_name: &str,
    records: &[LabeledRecord],
    config: &MinerConfig,
    chunk_size: usize,
) -> Result<DatasetRun, EvalError> {
    let contents: Vec<&str> = records.iter().map(|r| r.content.as_str()).collect();
    let bench = throughput_bench(dataset_name, config, &contents, chunk_size)?;
    let grouping = grouping_accuracy(dataset_name, records, &bench.template_ids)?;
    Ok(DatasetRun { grouping, bench })
}
