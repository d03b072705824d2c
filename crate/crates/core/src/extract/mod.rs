//! Identifier extraction: source text to a bag of normalized terms.
//!
//! The grammar path walks a tree-sitter parse and keeps identifier leaves,
//! skipping comments and literals. Files that fail to parse fall back to the
//! lexical scanner in [`lexer`] and are flagged.

mod grammar;
pub mod lexer;
pub mod tokenize;

use std::borrow::Cow;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::language::Language;
pub use tokenize::{parse_stopwords, split_identifier, Tokenizer};

/// Raw identifiers of one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identifiers {
    /// Source order, duplicates preserved.
    pub identifiers: Vec<String>,
    /// `package` (Java) or `namespace` (C#) declaration, if any.
    pub declared_package: Option<String>,
    /// True when the grammar parse failed and the lexical scan was used.
    pub fallback: bool,
}

pub fn decode_lossy(bytes: &[u8]) -> Cow<'_, str> {
    String::from_utf8_lossy(bytes)
}

pub fn parse_identifiers(content: &str, language: Language) -> Identifiers {
    match grammar::extract(content, language) {
        Some(g) => Identifiers {
            identifiers: g.identifiers,
            declared_package: g.declared_package,
            fallback: false,
        },
        None => Identifiers {
            identifiers: lexer::scan_identifiers(content, language),
            declared_package: lexer::scan_declared_package(content, language),
            fallback: true,
        },
    }
}

/// Multiset of normalized terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermBag {
    counts: BTreeMap<String, u32>,
    total: u64,
}

impl TermBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: impl Into<String>, n: u32) {
        if n == 0 {
            return;
        }
        *self.counts.entry(term.into()).or_insert(0) += n;
        self.total += n as u64;
    }

    pub fn count(&self, term: &str) -> u32 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<String, u32> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }
}

impl<S: Into<String>> FromIterator<S> for TermBag {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut bag = TermBag::new();
        for term in iter {
            bag.add(term, 1);
        }
        bag
    }
}

/// Term bag plus the per-file metadata that downstream stages need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedFile {
    pub bag: TermBag,
    pub declared_package: Option<String>,
    pub fallback: bool,
}

pub fn term_bag(content: &str, language: Language, tokenizer: &Tokenizer) -> TermBag {
    extract_file(content, language, tokenizer, None).bag
}

/// Extracts a file's term bag. When `path` is given, the terms of its path
/// segments are added too.
pub fn extract_file(
    content: &str,
    language: Language,
    tokenizer: &Tokenizer,
    path: Option<&str>,
) -> ExtractedFile {
    let ids = parse_identifiers(content, language);
    let mut bag: TermBag = ids
        .identifiers
        .iter()
        .flat_map(|id| tokenizer.tokenize(id))
        .collect();
    if let Some(path) = path {
        let stem = path.rsplit_once('.').map_or(path, |(s, _)| s);
        for segment in stem.split('/') {
            for term in tokenizer.tokenize(segment) {
                bag.add(term, 1);
            }
        }
    }
    ExtractedFile {
        bag,
        declared_package: ids.declared_package,
        fallback: ids.fallback,
    }
}
