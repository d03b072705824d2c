//! Analysis results and their storage backends.
//!
//! Two backends share the [`ResultStore`] interface: canonical JSON files
//! laid out as `<dir>/<name>/<sha>/<fingerprint>.json`, and a relational
//! table keyed by `(name, version_sha, config)`.

pub mod canonical;
mod json;
mod relational;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use json::{read_json, write_json, JsonStore};
pub use relational::{RelationalStore, DEFAULT_MAX_DOCUMENT_BYTES, MIGRATION};

use crate::aggregate::{PackageAnnotation, ProjectAnnotation};
use crate::annotate::FileAnnotation;
use crate::ingest::{CommitSha, ProjectDescriptor, VersionRef};

/// Environment variable naming the relational store.
pub const DB_URL_ENV: &str = "AUTOFL_DB_URL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub project: ProjectDescriptor,
    pub version: VersionRef,
    pub config_fingerprint: String,
    /// The fully resolved run configuration.
    pub config: serde_json::Value,
    pub files: Vec<FileAnnotation>,
    pub packages: Vec<PackageAnnotation>,
    pub project_annotation: ProjectAnnotation,
    /// Stage name to wall-clock milliseconds.
    pub timings: BTreeMap<String, u64>,
    pub tool_version: String,
}

impl AnalysisResult {
    pub fn key(&self) -> ResultKey {
        ResultKey {
            name: self.project.name.clone(),
            sha: self.version.version_sha.clone(),
            config_fingerprint: self.config_fingerprint.clone(),
        }
    }

    pub fn summary(&self) -> ResultSummary {
        ResultSummary {
            name: self.project.name.clone(),
            version_sha: self.version.version_sha.clone(),
            version_num: self.version.version_num,
            config_fingerprint: self.config_fingerprint.clone(),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        canonical::to_canonical_string(self).expect("analysis result serializes")
    }

    /// The value as it reads back from either backend (floats at 6
    /// significant digits).
    pub fn canonicalized(&self) -> AnalysisResult {
        serde_json::from_value(canonical::to_canonical_value(self).expect("serializes"))
            .expect("canonical value deserializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResultKey {
    pub name: String,
    pub sha: CommitSha,
    pub config_fingerprint: String,
}

impl std::fmt::Display for ResultKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{} [{}]", self.name, self.sha, self.config_fingerprint)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResultSummary {
    pub name: String,
    pub version_sha: CommitSha,
    pub version_num: i64,
    pub config_fingerprint: String,
}

impl ResultSummary {
    pub fn key(&self) -> ResultKey {
        ResultKey {
            name: self.name.clone(),
            sha: self.version_sha.clone(),
            config_fingerprint: self.config_fingerprint.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("decode error in {location}: {message}")]
    Decode { location: String, message: String },
    #[error("not found: {0}")]
    NotFound(ResultKey),
    #[error("result too large: {bytes} bytes exceeds the {limit}-byte document limit")]
    TooLarge { bytes: usize, limit: usize },
    #[error("database error: {0}")]
    Database(#[from] rusqlite::Error),
    #[error("unsupported database url `{0}` (expected sqlite://<path> or sqlite::memory:)")]
    UnsupportedUrl(String),
}

pub trait ResultStore: Send + Sync {
    /// Inserts or replaces the result under its key; returns a location
    /// description.
    fn write(&self, result: &AnalysisResult) -> Result<String, PersistError>;
    fn read(&self, key: &ResultKey) -> Result<AnalysisResult, PersistError>;
    /// All stored keys, sorted.
    fn list(&self) -> Result<Vec<ResultSummary>, PersistError>;
    fn describe(&self) -> String;

    /// Every configuration variant stored for one commit.
    fn variants(&self, name: &str, sha: &CommitSha) -> Result<Vec<ResultSummary>, PersistError> {
        Ok(self
            .list()?
            .into_iter()
            .filter(|s| s.name == name && &s.version_sha == sha)
            .collect())
    }
}

/// Opens the relational store named by `AUTOFL_DB_URL`, if set.
pub fn relational_from_env() -> Result<Option<RelationalStore>, PersistError> {
    match std::env::var(DB_URL_ENV) {
        Ok(url) if !url.trim().is_empty() => RelationalStore::open(&url).map(Some),
        _ => Ok(None),
    }
}
