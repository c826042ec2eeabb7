//! Corpora and warmed-up miners shared by the benchmarks.

use ustep_core::synth::{mixed_templates, Generator, NUMBER_MASK};
use ustep_core::{Miner, MinerConfig};

/// `lines` messages cycling through `templates` generated templates.
pub fn cyclic_corpus(templates: usize, lines: usize, seed: u64) -> Vec<String> {
    Generator::new(mixed_templates(seed, templates, 2..=24), seed + 1)
        .cyclic_lines(lines)
        .into_iter()
        .map(|l| l.text)
        .collect()
}

pub fn masked_config(sigma: f64, phi: usize) -> MinerConfig {
    MinerConfig::new(sigma, phi).with_masks([NUMBER_MASK])
}

/// A miner that has already seen every line of `corpus` once, so further
/// messages from the same corpus exercise the steady state.
pub fn warmed_miner(config: MinerConfig, corpus: &[String]) -> Miner {
    let mut miner = Miner::new(config).expect("valid bench config");
    for line in corpus {
        miner.process_message(line);
    }
    miner
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warm_miner_stops_creating_templates() {
        let corpus = cyclic_corpus(50, 5_000, 3);
        let mut miner = warmed_miner(masked_config(0.5, 4), &corpus);
        let before = miner.stats().template_count;
        for line in &corpus[..500] {
            assert!(!miner.process_message(line).created_new);
        }
        assert_eq!(miner.stats().template_count, before);
    }
}
