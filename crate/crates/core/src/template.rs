//! Templates, the similarity factor and the template update rule.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::token::{render, Token};

/// Stable template identifier. Ids start at 1, grow monotonically and are
/// never reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemplateId(pub u64);

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: TemplateId,
    pub tokens: Vec<Token>,
    pub match_count: u64,
}

impl Template {
    pub fn new(id: TemplateId, tokens: Vec<Token>) -> Template {
        Template { id, tokens, match_count: 1 }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn wildcard_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_wildcard()).count()
    }

    pub fn render(&self) -> String {
        render(&self.tokens)
    }

    /// Replaces every position that disagrees with `message` by a wildcard
    /// and counts the match. Returns whether any token changed.
    ///
    /// # Panics
    ///
    /// If the lengths differ.
    pub fn absorb(&mut self, message: &[Token]) -> bool {
        assert_eq!(self.tokens.len(), message.len(), "template/message length mismatch");
        let mut changed = false;
        for (slot, token) in self.tokens.iter_mut().zip(message) {
            if slot != token && !slot.is_wildcard() {
                *slot = Token::Wildcard;
                changed = true;
            }
        }
        self.match_count += 1;
        changed
    }

    /// Message tokens found at this template's wildcard positions, in order.
    pub fn extract_variables(&self, message: &[Token]) -> Vec<String> {
        self.tokens
            .iter()
            .zip(message)
            .filter(|(slot, _)| slot.is_wildcard())
            .map(|(_, token)| token.as_str().to_owned())
            .collect()
    }
}

/// Number of positions where `message` agrees with `template`.
///
/// Equality is token equality. Unless `strict`, a template wildcard also
/// agrees with any message token.
pub fn matching_positions(message: &[Token], template: &[Token], strict: bool) -> usize {
    assert_eq!(message.len(), template.len(), "template/message length mismatch");
    message
        .iter()
        .zip(template)
        .filter(|(m, t)| m == t || (!strict && t.is_wildcard()))
        .count()
}

/// Similarity factor: fraction of positions where message and template agree.
///
/// # Panics
///
/// If the lengths differ or the message is empty.
pub fn sim_f(message: &[Token], template: &[Token], strict: bool) -> f64 {
    assert!(!message.is_empty(), "similarity of an empty message is undefined");
    matching_positions(message, template, strict) as f64 / message.len() as f64
}
