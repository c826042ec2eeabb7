//! Optional regex masking applied before tokenization.

use std::borrow::Cow;

use regex::{NoExpand, Regex};

use crate::error::ConfigError;
use crate::token::WILDCARD_MARKER;

/// Ordered, compiled masking rules.
///
/// Every match of every rule is replaced by `<*>`, rule by rule in list
/// order. A match inside a longer word only replaces the matched span.
#[derive(Clone, Debug, Default)]
pub struct MaskRules {
    rules: Vec<Regex>,
}

impl MaskRules {
    pub fn compile<S: AsRef<str>>(patterns: &[S]) -> Result<MaskRules, ConfigError> {
        let rules = patterns
            .iter()
            .map(|p| {
                let pattern = p.as_ref();
                Regex::new(pattern).map_err(|source| ConfigError::InvalidMask {
                    pattern: pattern.to_owned(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MaskRules { rules })
    }

    /// Parses a rules file: one regex per line, blank lines and lines starting
    /// with `#` ignored.
    pub fn parse_file_contents(text: &str) -> Result<Vec<String>, ConfigError> {
        let patterns: Vec<String> = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(str::to_owned)
            .collect();
        // Compile once so a bad file is rejected before any processing.
        MaskRules::compile(&patterns)?;
        Ok(patterns)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn apply<'a>(&self, raw: &'a str) -> Cow<'a, str> {
        let mut text = Cow::Borrowed(raw);
        for rule in &self.rules {
            if let Cow::Owned(replaced) = rule.replace_all(&text, NoExpand(WILDCARD_MARKER)) {
                text = Cow::Owned(replaced);
            }
        }
        text
    }
}

/// Masks `raw` with `rules`.
pub fn preprocess<'a>(raw: &'a str, rules: &MaskRules) -> Cow<'a, str> {
    rules.apply(raw)
}
