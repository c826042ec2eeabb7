use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{grouping_accuracy, EvalError, LabeledRecord};
use crate::miner::{Miner, MinerConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub sigma: f64,
    pub phi: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub sigma: f64,
    pub phi: usize,
    pub parsing_accuracy: f64,
    pub template_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub dataset_name: String,
    pub best: SweepResult,
    pub results: Vec<SweepResult>,
}

impl SweepReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for row in &self.results {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Every `(sigma, phi)` combination, sigma-major.
pub fn grid_product(sigmas: &[f64], phis: &[usize]) -> Vec<GridPoint> {
    sigmas.iter().flat_map(|&sigma| phis.iter().map(move |&phi| GridPoint { sigma, phi })).collect()
}

/// Parses a grid file: one `sigma,phi` pair per line (comma or whitespace
/// separated). Blank lines, `#` comments and a `sigma,phi` header are skipped.
pub fn parse_grid(text: &str) -> Result<Vec<GridPoint>, EvalError> {
    let mut grid = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("sigma,phi") {
            continue;
        }
        let bad = || EvalError::Grid(format!("line {}: expected `sigma,phi`, got {line:?}", number + 1));
        let fields: Vec<&str> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let [sigma, phi] = fields[..] else { return Err(bad()) };
        let sigma: f64 = sigma.parse().map_err(|_| bad())?;
        let phi: usize = phi.parse().map_err(|_| bad())?;
        grid.push(GridPoint { sigma, phi });
    }
    Ok(grid)
}

/// Runs one fresh miner per grid point over `records` and scores each run.
///
/// Masks and similarity mode come from `base`. Points run in parallel but
/// results keep grid order; the best is the first point with maximal PA.
pub fn sweep(
    dataset_name: &str,
    records: &[LabeledRecord],
    base: &MinerConfig,
    grid: &[GridPoint],
) -> Result<SweepReport, EvalError> {
    if grid.is_empty() {
        return Err(EvalError::Grid("empty grid".into()));
    }
    let configs: Vec<MinerConfig> = grid
        .iter()
        .map(|p| MinerConfig { sigma: p.sigma, phi: p.phi, ..base.clone() })
        .collect();
    for config in &configs {
        config.validate()?;
    }
    let results = configs
        .par_iter()
        .map(|config| {
            let mut miner = Miner::new(config.clone())?;
            let ids: Vec<_> = records.iter().map(|r| miner.process_message(&r.content).template_id).collect();
            let report = grouping_accuracy(dataset_name, records, &ids)?;
            Ok(SweepResult {
                sigma: config.sigma,
                phi: config.phi,
                parsing_accuracy: report.parsing_accuracy,
                template_count: miner.stats().template_count,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let mut best = &results[0];
    for r in &results[1..] {
        if r.parsing_accuracy > best.parsing_accuracy {
            best = r;
        }
    }
    Ok(SweepReport { dataset_name: dataset_name.to_owned(), best: best.clone(), results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_file_formats() {
        let grid = parse_grid("sigma,phi\n# coarse\n0.5,4\n\n0.7 8\n").unwrap();
        assert_eq!(grid, [GridPoint { sigma: 0.5, phi: 4 }, GridPoint { sigma: 0.7, phi: 8 }]);
        assert!(parse_grid("0.5\n").is_err());
        assert!(parse_grid("x,4\n").is_err());
        assert!(parse_grid("").unwrap().is_empty());
    }

    #[test]
    fn product_order() {
        let grid = grid_product(&[0.3, 0.5], &[2, 4]);
        let pairs: Vec<(f64, usize)> = grid.iter().map(|p| (p.sigma, p.phi)).collect();
        assert_eq!(pairs, [(0.3, 2), (0.3, 4), (0.5, 2), (0.5, 4)]);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(matches!(sweep("t", &[], &MinerConfig::default(), &[]), Err(EvalError::Grid(_))));
    }

    #[test]
    fn invalid_point_rejected() {
        let grid = [GridPoint { sigma: 2.0, phi: 4 }];
        assert!(matches!(sweep("t", &[], &MinerConfig::default(), &grid), Err(EvalError::Config(_))));
    }
}
