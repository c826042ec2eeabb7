use serde::{Deserialize, Serialize};

use super::EvalError;

/// Spread of parsing accuracy across datasets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub values: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub iqr: f64,
}

/// Quantile by inclusive linear interpolation: position `q * (n - 1)` in
/// the sorted data, interpolated between its two neighbours.
pub fn quantile_inclusive(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let position = q * (sorted.len() - 1) as f64;
    let lower = position.floor() as usize;
    let upper = position.ceil() as usize;
    let fraction = position - lower as f64;
    sorted[lower] + (sorted[upper] - sorted[lower]) * fraction
}

pub fn robustness_stats(values: &[f64]) -> Result<RobustnessReport, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_inclusive(&sorted, 0.25);
    let q3 = quantile_inclusive(&sorted, 0.75);
    Ok(RobustnessReport {
        values: values.to_vec(),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        min: sorted[0],
        q1,
        median: quantile_inclusive(&sorted, 0.5),
        q3,
        max: sorted[sorted.len() - 1],
        iqr: q3 - q1,
    })
}
