//! Seeded synthetic log corpora with known generating templates.
//!
//! Every generated line records which template produced it, so a grouping
//! of the lines can be checked against the generator's own partition.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mask rule that turns the numeric variables emitted here into `<*>`.
pub const NUMBER_MASK: &str = r"\b[0-9]+\b";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Const(String),
    /// A decimal number, different on almost every line.
    Number,
    /// One word out of a small fixed pool.
    Choice(Vec<String>),
    /// A word never emitted twice by the same [`Generator`].
    Unique,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntheticTemplate {
    pub slots: Vec<Slot>,
}

impl SyntheticTemplate {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn variable_count(&self) -> usize {
        self.slots.iter().filter(|s| !matches!(s, Slot::Const(_))).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedLine {
    pub text: String,
    /// Index of the generating template.
    pub group: usize,
}

/// Line generator over a fixed template set.
#[derive(Debug)]
pub struct Generator {
    templates: Vec<SyntheticTemplate>,
    rng: ChaCha8Rng,
    unique_counter: u64,
}

impl Generator {
    pub fn new(templates: Vec<SyntheticTemplate>, seed: u64) -> Generator {
        Generator { templates, rng: ChaCha8Rng::seed_from_u64(seed), unique_counter: 0 }
    }

    pub fn templates(&self) -> &[SyntheticTemplate] {
        &self.templates
    }

    pub fn line(&mut self, group: usize) -> GeneratedLine {
        let mut words = Vec::with_capacity(self.templates[group].slots.len());
        for slot in &self.templates[group].slots {
            words.push(match slot {
                Slot::Const(word) => word.clone(),
                Slot::Number => self.rng.random_range(0..1_000_000u32).to_string(),
                Slot::Choice(pool) => pool.choose(&mut self.rng).expect("empty choice pool").clone(),
                Slot::Unique => {
                    self.unique_counter += 1;
                    format!("u{}", self.unique_counter)
                }
            });
        }
        GeneratedLine { text: words.join(" "), group }
    }

    /// `count` lines with templates picked uniformly at random.
    pub fn random_lines(&mut self, count: usize) -> Vec<GeneratedLine> {
        (0..count)
            .map(|_| {
                let group = self.rng.random_range(0..self.templates.len());
                self.line(group)
            })
            .collect()
    }

    /// `count` lines cycling through the templates in order.
    pub fn cyclic_lines(&mut self, count: usize) -> Vec<GeneratedLine> {
        (0..count).map(|i| self.line(i % self.templates.len())).collect()
    }
}

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ne", "pu", "ra", "si", "to", "ve", "zu", "ba", "de", "fi", "go", "hu", "ja",
];

fn random_word(rng: &mut impl Rng) -> String {
    let parts = rng.random_range(2..=4);
    (0..parts).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

/// Realistic mixed template set: constants, masked numbers and small word
/// pools. Lengths are drawn from `lengths`.
pub fn mixed_templates(
    seed: u64,
    count: usize,
    lengths: std::ops::RangeInclusive<usize>,
) -> Vec<SyntheticTemplate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SyntheticTemplate> = Vec::with_capacity(count);
    while out.len() < count {
        let len = rng.random_range(lengths.clone());
        let slots: Vec<Slot> = (0..len)
            .map(|i| {
                // Leading token is always constant, like a log verb.
                let roll = if i == 0 { 0.0 } else { rng.random::<f64>() };
                if roll < 0.7 {
                    Slot::Const(random_word(&mut rng))
                } else if roll < 0.9 {
                    Slot::Number
                } else {
                    let pool = rng.random_range(2..=4);
                    Slot::Choice((0..pool).map(|_| random_word(&mut rng)).collect())
                }
            })
            .collect();
        let candidate = SyntheticTemplate { slots };
        if !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

/// Templates for which the miner's grouping is fully determined at
/// `sigma = 0.5` in non-strict mode as long as no leaf ever splits.
///
/// All templates share `length`. Each has fewer than `length / 2` single
/// token [`Slot::Unique`] variables, so a line always matches its own
/// (possibly generalized) template with similarity above one half. For every
/// pair, the shared constant positions plus the variable slots of either
/// template cover at most half the positions, so a line never matches a
/// foreign template above one half.
pub fn separable_templates(seed: u64, count: usize, length: usize) -> Vec<SyntheticTemplate> {
    assert!(length >= 3, "need room for a variable and a majority of constants");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = length / 2; // floor(L/2): sim <= 0.5 <=> matches <= L/2
    loop {
        let mut out: Vec<SyntheticTemplate> = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 1000 {
            attempts += 1;
            let max_vars = (length - 1) / 2; // strictly below L/2
            let vars = rng.random_range(0..=max_vars);
            let mut slots: Vec<Slot> = (0..length)
                .map(|_| {
                    // Small vocabulary so templates sometimes share constants.
                    let word = *SYLLABLES.choose(&mut rng).unwrap();
                    Slot::Const(format!("{word}{}", rng.random_range(0..3)))
                })
                .collect();
            let mut positions: Vec<usize> = (0..length).collect();
            for _ in 0..vars {
                let pick = rng.random_range(0..positions.len());
                slots[positions.swap_remove(pick)] = Slot::Unique;
            }
            let candidate = SyntheticTemplate { slots };
            let compatible = out.iter().all(|other| {
                let shared = candidate
                    .slots
                    .iter()
                    .zip(&other.slots)
                    .filter(|(a, b)| matches!(a, Slot::Const(_)) && a == b)
                    .count();
                shared + candidate.variable_count() <= half && shared + other.variable_count() <= half
            });
            if compatible {
                out.push(candidate);
            }
        }
        if out.len() == count {
            return out;
        }
    }
}

/// Stress corpus: mostly lines from [`mixed_templates`], interleaved with
/// lines of random tokens drawn from a tiny vocabulary that includes a
/// literal `*` and the `<*>` marker. The `group` of a random line is
/// `usize::MAX`.
pub fn noisy_lines(seed: u64, count: usize, lengths: std::ops::RangeInclusive<usize>) -> Vec<GeneratedLine> {
    const NOISE: &[&str] = &["a", "b", "c", "*", "<*>", "0", "1", "x=1", "err", "ok"];
    let templates = mixed_templates(seed, 60, lengths.clone());
    let mut generator = Generator::new(templates, seed ^ 0x5eed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31));
    (0..count)
        .map(|_| {
            if rng.random::<f64>() < 0.8 {
                let group = rng.random_range(0..generator.templates.len());
                generator.line(group)
            } else {
                let len = rng.random_range(lengths.clone());
                let words: Vec<&str> = (0..len).map(|_| *NOISE.choose(&mut rng).unwrap()).collect();
                GeneratedLine { text: words.join(" "), group: usize::MAX }
            }
        })
        .collect()
}
