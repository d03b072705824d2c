//! Label taxonomy: the flat list of application-domain labels with their
//! weighted keywords, plus the inverted keyword index used by the keyword
//! labelling function.
//!
//! IDF is computed over labels, treating each label's keyword set as a
//! document: `idf(t) = 1 + ln(m / df(t))`, where `df(t)` counts the labels
//! that list `t`. A term shared by every label therefore gets weight 1, not 0.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Dense label identifier in `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelId(pub u32);

impl LabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub id: LabelId,
    pub name: String,
    #[serde(default)]
    pub keywords: BTreeMap<String, f64>,
}

impl Label {
    /// Euclidean norm of the keyword weight vector.
    pub fn keyword_norm(&self) -> f64 {
        self.keywords.values().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// A validated taxonomy. Labels are stored in id order, so `labels[i].id == i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Taxonomy {
    labels: Vec<Label>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaxonomyFormat {
    Json,
    Yaml,
}

impl TaxonomyFormat {
    /// Picks the parser from the file extension; anything that is not
    /// `.yaml`/`.yml` is read as JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("yaml") | Some("yml") => TaxonomyFormat::Yaml,
            _ => TaxonomyFormat::Json,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TaxonomyError {
    #[error("cannot read taxonomy {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed taxonomy document: {0}")]
    Malformed(String),
    #[error("taxonomy has no labels")]
    Empty,
    #[error("taxonomy needs at least 2 labels, found {0}")]
    TooFewLabels(usize),
    #[error("duplicate label id {0}")]
    DuplicateId(LabelId),
    #[error("label ids must be contiguous from 0; id {missing} is missing")]
    NonContiguousIds { missing: u32 },
    #[error("label {id} has an empty name")]
    EmptyName { id: LabelId },
    #[error("duplicate name `{name}` (labels {first} and {second})")]
    DuplicateName {
        name: String,
        first: LabelId,
        second: LabelId,
    },
    #[error("label `{label}`: invalid keyword `{term}` (must be non-empty without whitespace)")]
    InvalidTerm { label: String, term: String },
    #[error("label `{label}`: keyword `{term}` appears twice after lowercasing")]
    DuplicateKeyword { label: String, term: String },
    #[error("label `{label}`: keyword `{term}` has non-positive weight {weight}")]
    NonPositiveWeight {
        label: String,
        term: String,
        weight: f64,
    },
}

#[derive(Deserialize)]
struct TaxonomyDocument {
    labels: Vec<Label>,
}

impl Taxonomy {
    /// Validates raw labels (in any order) into a taxonomy. Keyword terms are
    /// lowercased.
    pub fn new(labels: Vec<Label>) -> Result<Self, TaxonomyError> {
        if labels.is_empty() {
            return Err(TaxonomyError::Empty);
        }
        let mut by_id: BTreeMap<LabelId, Label> = BTreeMap::new();
        for mut label in labels {
            if label.name.trim().is_empty() {
                return Err(TaxonomyError::EmptyName { id: label.id });
            }
            let mut lowered = BTreeMap::new();
            for (term, weight) in std::mem::take(&mut label.keywords) {
                if term.is_empty() || term.chars().any(char::is_whitespace) {
                    return Err(TaxonomyError::InvalidTerm {
                        label: label.name.clone(),
                        term,
                    });
                }
                if !(weight > 0.0) || !weight.is_finite() {
                    return Err(TaxonomyError::NonPositiveWeight {
                        label: label.name.clone(),
                        term,
                        weight,
                    });
                }
                let lower = term.to_lowercase();
                if lowered.insert(lower.clone(), weight).is_some() {
                    return Err(TaxonomyError::DuplicateKeyword {
                        label: label.name.clone(),
                        term: lower,
                    });
                }
            }
            label.keywords = lowered;
            let id = label.id;
            if by_id.insert(id, label).is_some() {
                return Err(TaxonomyError::DuplicateId(id));
            }
        }
        for (expected, id) in by_id.keys().enumerate() {
            if id.index() != expected {
                return Err(TaxonomyError::NonContiguousIds {
                    missing: expected as u32,
                });
            }
        }
        if by_id.len() < 2 {
            return Err(TaxonomyError::TooFewLabels(by_id.len()));
        }
        let labels: Vec<Label> = by_id.into_values().collect();
        let mut seen: BTreeMap<String, LabelId> = BTreeMap::new();
        for label in &labels {
            let folded = label.name.to_lowercase();
            if let Some(first) = seen.insert(folded, label.id) {
                return Err(TaxonomyError::DuplicateName {
                    name: label.name.clone(),
                    first,
                    second: label.id,
                });
            }
        }
        Ok(Taxonomy { labels })
    }

    pub fn from_reader(mut reader: impl Read, format: TaxonomyFormat) -> Result<Self, TaxonomyError> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| TaxonomyError::Malformed(format!("not valid UTF-8: {e}")))?;
        Self::from_str_with(&text, format)
    }

    pub fn from_str_with(text: &str, format: TaxonomyFormat) -> Result<Self, TaxonomyError> {
        let doc: TaxonomyDocument = match format {
            TaxonomyFormat::Json => {
                serde_json::from_str(text).map_err(|e| TaxonomyError::Malformed(e.to_string()))?
            }
            TaxonomyFormat::Yaml => {
                serde_yaml::from_str(text).map_err(|e| TaxonomyError::Malformed(e.to_string()))?
            }
        };
        Self::new(doc.labels)
    }

    /// Loads a taxonomy file, choosing the format from its extension unless
    /// `format` is given.
    pub fn load(path: &Path, format: Option<TaxonomyFormat>) -> Result<Self, TaxonomyError> {
        let file = std::fs::File::open(path).map_err(|source| TaxonomyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_reader(file, format.unwrap_or_else(|| TaxonomyFormat::from_path(path)))
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Number of labels, the length of every annotation vector.
    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, id: LabelId) -> Option<&Label> {
        self.labels.get(id.index())
    }

    pub fn name_of(&self, id: LabelId) -> Option<&str> {
        self.label(id).map(|l| l.name.as_str())
    }

    /// Case-insensitive lookup by label name.
    pub fn id_of(&self, name: &str) -> Option<LabelId> {
        let folded = name.trim().to_lowercase();
        self.labels
            .iter()
            .find(|l| l.name.to_lowercase() == folded)
            .map(|l| l.id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("taxonomy serializes")
    }
}

/// Inverted index from keyword term to the labels that list it.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordIndex {
    postings: BTreeMap<String, Vec<(LabelId, f64)>>,
    idf: BTreeMap<String, f64>,
}

impl KeywordIndex {
    pub fn build(taxonomy: &Taxonomy) -> Self {
        let mut postings: BTreeMap<String, Vec<(LabelId, f64)>> = BTreeMap::new();
        for label in taxonomy.labels() {
            for (term, &weight) in &label.keywords {
                postings.entry(term.clone()).or_default().push((label.id, weight));
            }
        }
        let m = taxonomy.m() as f64;
        let idf = postings
            .iter()
            .map(|(term, posts)| {
                let df = posts.iter().map(|(id, _)| *id).collect::<HashSet<_>>().len();
                (term.clone(), 1.0 + (m / df as f64).ln())
            })
            .collect();
        KeywordIndex { postings, idf }
    }

    pub fn postings(&self, term: &str) -> Option<&[(LabelId, f64)]> {
        self.postings.get(term).map(Vec::as_slice)
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.idf.get(term).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.postings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }
}
