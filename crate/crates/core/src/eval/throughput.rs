use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::miner::{Miner, MinerConfig, MinerStats};
use crate::template::TemplateId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChunkTiming {
    pub chunk_index: usize,
    pub messages: usize,
    pub seconds: f64,
    pub cumulative_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub dataset_name: String,
    pub total_messages: usize,
    /// Measured around the whole run, independently of the chunk clocks.
    pub total_seconds: f64,
    pub chunk_size: usize,
    pub chunks: Vec<ChunkTiming>,
}

impl ThroughputReport {
    /// Mean seconds per message inside one chunk.
    pub fn mean_message_seconds(&self, chunk: usize) -> Option<f64> {
        let c = self.chunks.get(chunk)?;
        (c.messages > 0).then(|| c.seconds / c.messages as f64)
    }

    /// Writes `chunk_index,messages,seconds,cumulative_seconds` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for chunk in &self.chunks {
            out.serialize(chunk)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Outcome of one timed pass over a stream.
#[derive(Clone, Debug)]
pub struct BenchRun {
    pub report: ThroughputReport,
    /// Template id assigned to each input line, in order.
    pub template_ids: Vec<TemplateId>,
    pub stats: MinerStats,
}

/// Feeds `lines` through a fresh miner once, timing each chunk of
/// `chunk_size` messages. Timings cover masking and tokenization.
///
/// # Panics
///
/// If `chunk_size` is zero.
pub fn throughput_bench<S: AsRef<str>>(
    dataset_name: &str,
    config: &MinerConfig,
    lines: &[S],
    chunk_size: usize,
) -> Result<BenchRun, ConfigError> {
    assert!(chunk_size >= 1, "chunk_size must be at least 1");
    let mut miner = Miner::new(config.clone())?;
    let mut template_ids = Vec::with_capacity(lines.len());
    let mut chunks = Vec::with_capacity(lines.len().div_ceil(chunk_size));
    let mut cumulative = 0.0;

    let run_start = Instant::now();
    for (chunk_index, chunk) in lines.chunks(chunk_size).enumerate() {
        let start = Instant::now();
        for line in chunk {
            template_ids.push(miner.process_message(line.as_ref()).template_id);
        }
        let seconds = start.elapsed().as_secs_f64();
        cumulative += seconds;
        chunks.push(ChunkTiming { chunk_index, messages: chunk.len(), seconds, cumulative_seconds: cumulative });
    }
    let total_seconds = run_start.elapsed().as_secs_f64();

    Ok(BenchRun {
        report: ThroughputReport {
            dataset_name: dataset_name.to_owned(),
            total_messages: lines.len(),
            total_seconds,
            chunk_size,
            chunks,
        },
        template_ids,
        stats: miner.stats(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{mixed_templates, separable_templates, Generator, NUMBER_MASK};

    #[test]
    fn chunk_bookkeeping() {
        let lines: Vec<String> = (0..25).map(|i| format!("event {i} done")).collect();
        let run = throughput_bench("t", &MinerConfig::default(), &lines, 10).unwrap();
        let sizes: Vec<usize> = run.report.chunks.iter().map(|c| c.messages).collect();
        assert_eq!(sizes, [10, 10, 5]);
        assert_eq!(run.template_ids.len(), 25);
        let cumul: Vec<f64> = run.report.chunks.iter().map(|c| c.cumulative_seconds).collect();
        assert!(cumul.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = run.report.chunks.iter().map(|c| c.seconds).sum();
        assert!(sum <= run.report.total_seconds + 1e-9);
    }

    #[test]
    fn empty_stream() {
        let run = throughput_bench::<&str>("t", &MinerConfig::default(), &[], 10).unwrap();
        assert!(run.report.chunks.is_empty());
        assert!(run.report.total_seconds < 0.01);
        assert_eq!(run.stats.template_count, 0);
    }

    #[test]
    fn cyclic_stream_stabilizes_template_count() {
        let mut gen = Generator::new(separable_templates(11, 5, 8), 3);
        let lines: Vec<String> = gen.cyclic_lines(5000).into_iter().map(|l| l.text).collect();
        let run = throughput_bench("t", &MinerConfig::new(0.5, 8), &lines, 500).unwrap();
        assert_eq!(run.report.chunks.len(), 10);
        assert_eq!(run.stats.template_count, 5);

        let mut gen = Generator::new(mixed_templates(11, 40, 3..=9), 3);
        let lines: Vec<String> = gen.cyclic_lines(20_000).into_iter().map(|l| l.text).collect();
        let cfg = MinerConfig::new(0.5, 4).with_masks([NUMBER_MASK]);
        let half = throughput_bench("t", &cfg, &lines[..10_000], 500).unwrap();
        let full = throughput_bench("t", &cfg, &lines, 500).unwrap();
        assert_eq!(half.stats.template_count, full.stats.template_count);
        assert_eq!(half.stats.node_count, full.stats.node_count);
        assert!(full.stats.splits_performed > 0);
    }

    #[test]
    fn csv_layout() {
        let lines = ["a", "b", "c"];
        let run = throughput_bench("t", &MinerConfig::default(), &lines, 2).unwrap();
        let mut out = Vec::new();
        run.report.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut rows = text.lines();
        assert_eq!(rows.next(), Some("chunk_index,messages,seconds,cumulative_seconds"));
        assert_eq!(rows.count(), 2);
    }
}
