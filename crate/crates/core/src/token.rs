//! Tokens and whitespace tokenization.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Text used outside the miner for a variable slot.
///
/// Inside the miner the slot is [`Token::Wildcard`], so a literal `*` (or any
/// other text) in a log line can never be mistaken for a variable.
pub const WILDCARD_MARKER: &str = "<*>";

/// A single whitespace-free word of a log message, or a variable slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Wildcard,
    Literal(String),
}

impl Token {
    /// Builds a token from raw text. The marker `<*>` becomes the wildcard.
    pub fn from_text(text: &str) -> Token {
        if text == WILDCARD_MARKER {
            Token::Wildcard
        } else {
            Token::Literal(text.to_owned())
        }
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, Token::Wildcard)
    }

    pub fn as_str(&self) -> &str {
        match self {
            Token::Wildcard => WILDCARD_MARKER,
            Token::Literal(text) => text,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(serde::de::Error::custom(format!("invalid token {text:?}")));
        }
        Ok(Token::from_text(&text))
    }
}

/// A log line split into tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizedMessage {
    pub raw: String,
    pub tokens: Vec<Token>,
}

impl TokenizedMessage {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Splits a (possibly masked) line on whitespace runs.
pub fn tokenize(line: &str) -> TokenizedMessage {
    TokenizedMessage {
        raw: line.to_owned(),
        tokens: line.split_whitespace().map(Token::from_text).collect(),
    }
}

/// Renders a token sequence with single spaces and `<*>` for wildcards.
pub fn render(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, token) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(token.as_str());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Character-scan reference splitter, independent of `split_whitespace`.
    fn scan_split(line: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut current = String::new();
        for c in line.chars() {
            if c.is_whitespace() {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
        out
    }

    fn texts(msg: &TokenizedMessage) -> Vec<&str> {
        msg.tokens.iter().map(Token::as_str).collect()
    }

    #[test]
    fn splits_on_whitespace() {
        let msg = tokenize("Send 500 bytes");
        assert_eq!(texts(&msg), ["Send", "500", "bytes"]);
        assert_eq!(msg.len(), 3);
    }

    #[test]
    fn empty_line_has_no_tokens() {
        assert_eq!(tokenize("").len(), 0);
        assert!(tokenize(" \t ").is_empty());
    }

    #[test]
    fn double_space_is_one_separator() {
        let msg = tokenize("a  b");
        assert_eq!(texts(&msg), scan_split("a  b"));
        assert_eq!(msg.len(), 2);
    }

    #[test]
    fn marker_becomes_wildcard_but_star_does_not() {
        let msg = tokenize("x <*> * <*>y");
        assert_eq!(msg.tokens[1], Token::Wildcard);
        assert_eq!(msg.tokens[2], Token::Literal("*".into()));
        assert_eq!(msg.tokens[3], Token::Literal("<*>y".into()));
    }

    #[test]
    fn render_joins_with_marker() {
        let tokens = vec![Token::from_text("Send"), Token::Wildcard, Token::from_text("*")];
        assert_eq!(render(&tokens), "Send <*> *");
    }

    proptest! {
        #[test]
        fn matches_character_scan(line in "[ a-c\t*<>]{0,40}") {
            let msg = tokenize(&line);
            prop_assert_eq!(texts(&msg), scan_split(&line));
            prop_assert!(msg.tokens.iter().all(|t| !t.as_str().contains(char::is_whitespace)));
        }
    }
}
