use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use ustep_core::eval::{self, evaluate_dataset, parse_grid, sweep};
use ustep_core::{MaskRules, Miner, MinerConfig, MinerStats, TemplateId, TemplateSummary};

use crate::{CliError, Command, Format, MinerArgs};

pub(crate) fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Parse { input, miner, snapshot_in, snapshot_out } => {
            cmd_parse(&input, &miner, snapshot_in.as_deref(), snapshot_out.as_deref())
        }
        Command::Bench { input, miner, chunk_size, timing_csv, format, name } => {
            cmd_bench(&input, &miner, chunk_size, timing_csv.as_deref(), format, name)
        }
        Command::Sweep { input, grid, masks, strict_sim, format, results_out, name } => {
            let args = MinerArgs { sigma: None, phi: None, strict_sim, masks };
            cmd_sweep(&input, &grid, &args, format, results_out.as_deref(), name)
        }
        Command::Stats { snapshot_in } => cmd_stats(&snapshot_in),
    }
}

fn io_error(context: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{context}: {e}"))
}

fn build_config(args: &MinerArgs) -> Result<MinerConfig, CliError> {
    let defaults = MinerConfig::default();
    let mut config = MinerConfig::new(args.sigma.unwrap_or(defaults.sigma), args.phi.unwrap_or(defaults.phi))
        .strict(args.strict_sim);
    if let Some(path) = &args.masks {
        let text = fs::read_to_string(path).map_err(|e| io_error(path.display(), e))?;
        config.mask_rules = MaskRules::parse_file_contents(&text)?;
    }
    config.validate()?;
    Ok(config)
}

fn dataset_name(input: &Path, name: Option<String>) -> String {
    name.unwrap_or_else(|| {
        let stem = input.file_name().and_then(|s| s.to_str()).unwrap_or("dataset");
        stem.split('_').next().unwrap_or(stem).to_owned()
    })
}

#[derive(Serialize)]
struct ParseLine<'a> {
    line_no: u64,
    template_id: TemplateId,
    template: &'a str,
    variables: &'a [String],
    created_new: bool,
}

fn cmd_parse(
    input: &str,
    args: &MinerArgs,
    snapshot_in: Option<&Path>,
    snapshot_out: Option<&Path>,
) -> Result<(), CliError> {
    let mut miner = match snapshot_in {
        Some(path) => {
            if args.any_set() {
                eprintln!("ustep: --snapshot-in given, ignoring miner flags in favour of the snapshot's configuration");
            }
            let file = File::open(path).map_err(|e| io_error(path.display(), e))?;
            Miner::read_snapshot(BufReader::new(file))?
        }
        None => Miner::new(build_config(args)?)?,
    };
    // Fail before any processing if the snapshot destination is unusable.
    let snapshot_file = snapshot_out
        .map(|p| File::create(p).map(|f| (p, f)).map_err(|e| io_error(p.display(), e)))
        .transpose()?;

    let reader: Box<dyn BufRead> = if input == "-" {
        Box::new(io::stdin().lock())
    } else {
        let file = File::open(input).map_err(|e| io_error(input, e))?;
        Box::new(BufReader::new(file))
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());

    let start = Instant::now();
    let mut line_no = 0u64;
    for_each_line(reader, |line| {
        line_no += 1;
        let parsed = miner.process_message(line);
        let record = ParseLine {
            line_no,
            template_id: parsed.template_id,
            template: &parsed.template_text,
            variables: &parsed.variables,
            created_new: parsed.created_new,
        };
        serde_json::to_writer(&mut out, &record).map_err(io::Error::from)?;
        out.write_all(b"\n")
    })
    .map_err(|e| io_error(if input == "-" { "stdin/stdout" } else { input }, e))?;
    out.flush().map_err(|e| io_error("stdout", e))?;

    let stats = miner.stats();
    eprintln!(
        "messages={} templates={} nodes={} seconds={:.3}",
        line_no,
        stats.template_count,
        stats.node_count,
        start.elapsed().as_secs_f64()
    );

    if let Some((path, file)) = snapshot_file {
        let mut writer = BufWriter::new(file);
        miner
            .write_snapshot(&mut writer)
            .and_then(|_| writer.flush())
            .map_err(|e| io_error(path.display(), e))?;
    }
    Ok(())
}

/// Calls `f` on every line with the newline (and a trailing `\r`) removed.
/// Invalid UTF-8 is replaced rather than rejected.
fn for_each_line<R: BufRead>(
    mut reader: R,
    mut f: impl FnMut(&str) -> io::Result<()>,
) -> io::Result<()> {
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok(());
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        f(&String::from_utf8_lossy(&buf))?;
    }
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    grouping: &'a eval::GroupingReport,
    throughput: &'a eval::ThroughputReport,
    stats: MinerStats,
}

fn cmd_bench(
    input: &Path,
    args: &MinerArgs,
    chunk_size: usize,
    timing_csv: Option<&Path>,
    format: Format,
    name: Option<String>,
) -> Result<(), CliError> {
    if chunk_size == 0 {
        return Err(CliError::Usage("--chunk-size must be at least 1".into()));
    }
    let config = build_config(args)?;
    let records = eval::load_labeled_dataset(input)?;
    let name = dataset_name(input, name);
    let run = evaluate_dataset(&name, &records, &config, chunk_size)?;

    if let Some(path) = timing_csv {
        let file = File::create(path).map_err(|e| io_error(path.display(), e))?;
        run.bench.report.write_csv(file).map_err(|e| io_error(path.display(), e))?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            let output = BenchOutput {
                grouping: &run.grouping,
                throughput: &run.bench.report,
                stats: run.bench.stats,
            };
            serde_json::to_writer_pretty(&mut out, &output).map_err(|e| io_error("stdout", e))?;
            writeln!(out).map_err(|e| io_error("stdout", e))?;
        }
        Format::Csv => run.bench.report.write_csv(&mut out).map_err(|e| io_error("stdout", e))?,
    }
    eprintln!(
        "dataset={} messages={} parsing_accuracy={:.4} templates={} seconds={:.3}",
        name,
        run.grouping.total_messages,
        run.grouping.parsing_accuracy,
        run.bench.stats.template_count,
        run.bench.report.total_seconds
    );
    Ok(())
}

fn cmd_sweep(
    input: &Path,
    grid_path: &PathBuf,
    args: &MinerArgs,
    format: Format,
    results_out: Option<&Path>,
    name: Option<String>,
) -> Result<(), CliError> {
    let base = build_config(args)?;
    let grid_text = fs::read_to_string(grid_path).map_err(|e| io_error(grid_path.display(), e))?;
    let grid = parse_grid(&grid_text)?;
    if grid.is_empty() {
        return Err(CliError::Usage(format!("{}: empty grid", grid_path.display())));
    }
    let records = eval::load_labeled_dataset(input)?;
    let name = dataset_name(input, name);
    let report = sweep(&name, &records, &base, &grid)?;

    if let Some(path) = results_out {
        let file = File::create(path).map_err(|e| io_error(path.display(), e))?;
        report.write_csv(file).map_err(|e| io_error(path.display(), e))?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| io_error("stdout", e))?;
            writeln!(out).map_err(|e| io_error("stdout", e))?;
        }
        Format::Csv => report.write_csv(&mut out).map_err(|e| io_error("stdout", e))?,
    }
    eprintln!(
        "dataset={} best_sigma={} best_phi={} parsing_accuracy={:.4}",
        name, report.best.sigma, report.best.phi, report.best.parsing_accuracy
    );
    Ok(())
}

#[derive(Serialize)]
struct StatsOutput {
    #[serde(flatten)]
    stats: MinerStats,
    config: MinerConfig,
    templates: Vec<TemplateSummary>,
}

fn cmd_stats(snapshot: &Path) -> Result<(), CliError> {
    let file = File::open(snapshot).map_err(|e| io_error(snapshot.display(), e))?;
    let miner = Miner::read_snapshot(BufReader::new(file))?;
    let output = StatsOutput {
        stats: miner.stats(),
        config: miner.config().clone(),
        templates: miner.template_summaries(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, &output).map_err(|e| io_error("stdout", e))?;
    writeln!(out).map_err(|e| io_error("stdout", e))
}
