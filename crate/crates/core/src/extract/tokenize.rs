//! Identifier splitting and term normalization.

use std::collections::BTreeSet;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Splits identifiers into lowercase alphabetic terms and drops short terms
/// and stopwords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tokenizer {
    stopwords: BTreeSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::with_stopwords(DEFAULT_STOPWORDS)
    }
}

/// Parses a stopword list: one term per line, `#` comments.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

impl Tokenizer {
    pub fn with_stopwords(list: &str) -> Self {
        Tokenizer {
            stopwords: parse_stopwords(list),
        }
    }

    pub fn without_stopwords() -> Self {
        Tokenizer {
            stopwords: BTreeSet::new(),
        }
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn tokenize(&self, identifier: &str) -> Vec<String> {
        split_identifier(identifier)
            .into_iter()
            .map(|piece| piece.to_lowercase())
            .filter(|t| t.chars().count() >= 2 && !self.stopwords.contains(t))
            .collect()
    }
}

/// Raw subword pieces of an identifier: split on every non-alphabetic
/// character and at camel-case boundaries, keeping acronym runs together
/// (`XMLParser` gives `XML`, `Parser`).
pub fn split_identifier(identifier: &str) -> Vec<String> {
    let chars: Vec<char> = identifier.chars().collect();
    let mut pieces = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphabetic() {
            if !current.is_empty() {
                pieces.push(std::mem::take(&mut current));
            }
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).and_then(|j| chars.get(j)) {
            let next = chars.get(i + 1).copied();
            let boundary = prev.is_alphabetic()
                && c.is_uppercase()
                && (prev.is_lowercase() || (prev.is_uppercase() && next.is_some_and(char::is_lowercase)));
            if boundary && !current.is_empty() {
                pieces.push(std::mem::take(&mut current));
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        pieces.push(current);
    }
    pieces
}
