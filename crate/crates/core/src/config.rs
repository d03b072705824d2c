//! Run configuration: a YAML base document plus `key=value` overrides.
//!
//! Overrides address nested keys with dots and list items with indices, e.g.
//! `annotators.0.filter_threshold=0.2` or `ensemble=vote`. Values are parsed
//! as YAML scalars or flow collections.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::annotate::{validate_annotators, AnnotatorConfig, AnnotatorConfigError, EnsembleMode};
use crate::extract::Tokenizer;
use crate::ingest::IgnoreList;
use crate::persist::canonical;
use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputBackend {
    /// Canonical JSON files under `output_dir`.
    Json,
    /// The relational store named by `AUTOFL_DB_URL`; skipped when unset.
    Relational,
}

fn default_annotators() -> Vec<AnnotatorConfig> {
    vec![AnnotatorConfig::keyword("keyword_tfidf")]
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn default_outputs() -> Vec<OutputBackend> {
    vec![OutputBackend::Json, OutputBackend::Relational]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub taxonomy: PathBuf,
    #[serde(default = "default_annotators")]
    pub annotators: Vec<AnnotatorConfig>,
    #[serde(default)]
    pub ensemble: EnsembleMode,
    #[serde(default)]
    pub ignore: IgnoreList,
    /// Stopword list file; the bundled list when absent.
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    /// Also tokenize file paths into the term bag.
    #[serde(default)]
    pub path_terms: bool,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputBackend>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Stage timings make results non-reproducible byte for byte; turn off
    /// for deterministic output.
    #[serde(default = "yes")]
    pub record_timings: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config document: {0}")]
    Parse(String),
    #[error("invalid override `{0}` (expected key=value)")]
    Override(String),
    #[error("override `{key}`: {reason}")]
    OverridePath { key: String, reason: String },
    #[error(transparent)]
    Annotator(#[from] AnnotatorConfigError),
    #[error("at least one output backend is required")]
    NoOutputs,
    #[error("workers must be at least 1")]
    Workers,
    #[error("taxonomy {path}: {source}")]
    Taxonomy {
        path: String,
        #[source]
        source: crate::taxonomy::TaxonomyError,
    },
    #[error("cannot read stopwords {path}: {source}")]
    Stopwords {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Applies one `a.b.0.c=value` override to a JSON tree.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::Override(assignment.to_string()))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::Override(assignment.to_string()));
    }
    let value: Value = if raw.trim().is_empty() {
        Value::Null
    } else {
        serde_yaml::from_str(raw).map_err(|e| ConfigError::OverridePath {
            key: key.to_string(),
            reason: e.to_string(),
        })?
    };
    let path_err = |reason: &str| ConfigError::OverridePath {
        key: key.to_string(),
        reason: reason.to_string(),
    };
    let segments: Vec<&str> = key.split('.').collect();
    let mut node = doc;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), value);
                    return Ok(());
                }
                map.entry(seg.to_string()).or_insert(Value::Null)
            }
            Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| path_err("list index expected"))?;
                if idx > items.len() {
                    return Err(path_err("list index out of range"));
                }
                if idx == items.len() {
                    items.push(Value::Null);
                }
                if last {
                    items[idx] = value;
                    return Ok(());
                }
                &mut items[idx]
            }
            _ => return Err(path_err("cannot descend into a scalar")),
        };
    }
    unreachable!("loop returns on the last segment")
}

impl RunConfig {
    /// Loads the base document (if any), applies overrides in order and
    /// resolves relative paths against the config file's directory.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let (mut doc, base_dir) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                let doc: Value = if text.trim().is_empty() {
                    Value::Object(Default::default())
                } else {
                    serde_yaml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?
                };
                (doc, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (Value::Object(Default::default()), PathBuf::new()),
        };
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let mut cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.resolve_paths(&base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Minimal valid config around a taxonomy file.
    pub fn with_taxonomy(taxonomy: impl Into<PathBuf>) -> Self {
        RunConfig {
            taxonomy: taxonomy.into(),
            annotators: default_annotators(),
            ensemble: EnsembleMode::default(),
            ignore: IgnoreList::default(),
            stopwords: None,
            path_terms: false,
            workers: default_workers(),
            outputs: default_outputs(),
            output_dir: default_output_dir(),
            record_timings: true,
        }
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() && !base.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut self.taxonomy);
        if let Some(s) = self.stopwords.as_mut() {
            resolve(s);
        }
        resolve(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        validate_annotators(&self.annotators)?;
        if self.outputs.is_empty() {
            return Err(ConfigError::NoOutputs);
        }
        if self.workers == 0 {
            return Err(ConfigError::Workers);
        }
        Ok(())
    }

    pub fn load_taxonomy(&self) -> Result<Taxonomy, ConfigError> {
        Taxonomy::load(&self.taxonomy, None).map_err(|source| ConfigError::Taxonomy {
            path: self.taxonomy.display().to_string(),
            source,
        })
    }

    pub fn load_tokenizer(&self) -> Result<Tokenizer, ConfigError> {
        match &self.stopwords {
            None => Ok(Tokenizer::default()),
            Some(p) => std::fs::read_to_string(p)
                .map(|text| Tokenizer::with_stopwords(&text))
                .map_err(|source| ConfigError::Stopwords {
                    path: p.display().to_string(),
                    source,
                }),
        }
    }

    /// Identifies the analysis semantics of this config: annotators,
    /// ensemble, ignore rules, path-term flag, and the *content* of the
    /// taxonomy and stopword list. Operational settings (paths, worker
    /// count, outputs, timing capture) do not contribute, and neither does
    /// key order in the source document.
    pub fn fingerprint(&self, taxonomy: &Taxonomy, tokenizer: &Tokenizer) -> String {
        let material = serde_json::json!({
            "annotators": self.annotators,
            "ensemble": self.ensemble,
            "ignore": self.ignore,
            "path_terms": self.path_terms,
            "stopwords": tokenizer.stopwords(),
            "taxonomy": taxonomy,
        });
        let text = canonical::to_canonical_compact(&material).expect("config material serializes");
        let digest = Sha256::digest(text.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{LfKind, Transform};

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    const TAXONOMY: &str = r#"{"labels":[{"id":0,"name":"ui","keywords":{"button":1}},{"id":1,"name":"image","keywords":{"pixel":1}}]}"#;

    #[test]
    fn defaults_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "tax.json", TAXONOMY);
        let cfg_path = write(dir.path(), "run.yaml", "taxonomy: tax.json\n");
        let cfg = RunConfig::load(Some(&cfg_path), &[]).unwrap();
        assert_eq!(cfg.taxonomy, dir.path().join("tax.json"));
        assert_eq!(cfg.annotators.len(), 1);
        assert_eq!(cfg.annotators[0].kind, LfKind::KeywordTfidf);
        assert_eq!(cfg.annotators[0].filter_threshold, 0.1);
        assert_eq!(cfg.ignore, IgnoreList::default());
        assert!(cfg.load_taxonomy().is_ok());
    }

    #[test]
    fn overrides() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write(dir.path(), "run.yaml", "taxonomy: t.json\nannotators:\n  - {name: kw, kind: keyword_tfidf}\n");
        let cfg = RunConfig::load(
            Some(&cfg_path),
            &[
                "annotators.0.filter_threshold=0.25".into(),
                "annotators.0.transform={mode: top_k, k: 3}".into(),
                "annotators.1.name=sim".into(),
                "annotators.1.kind=similarity".into(),
                "ensemble=vote".into(),
                "ignore=[vendor]".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.annotators[0].filter_threshold, 0.25);
        assert_eq!(cfg.annotators[0].transform, Transform::TopK { k: 3 });
        assert_eq!(cfg.annotators[1].kind, LfKind::Similarity);
        assert_eq!(cfg.ensemble, EnsembleMode::Vote);
        assert_eq!(cfg.ignore, IgnoreList(vec!["vendor".into()]));
    }

    #[test]
    fn override_errors() {
        assert!(matches!(
            RunConfig::load(None, &["no_equals".into()]),
            Err(ConfigError::Override(_))
        ));
        assert!(RunConfig::load(None, &["taxonomy=t.json".into(), "annotators.5.name=x".into()]).is_err());
        assert!(RunConfig::load(None, &["taxonomy=t.json".into(), "bogus=1".into()]).is_err());
        assert!(RunConfig::load(None, &["taxonomy=t.json".into(), "outputs=[]".into()]).is_err());
        assert!(RunConfig::load(None, &[]).is_err());
    }

    #[test]
    fn fingerprint_ignores_key_order_and_operational_settings() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "tax.json", TAXONOMY);
        let a = write(
            dir.path(),
            "a.yaml",
            "taxonomy: tax.json\nworkers: 2\nannotators:\n  - {name: kw, kind: keyword_tfidf, filter_threshold: 0.1}\n",
        );
        let b = write(
            dir.path(),
            "b.yaml",
            "# comment\nannotators:\n  - {filter_threshold: 0.1, kind: keyword_tfidf, name: kw}\nworkers: 8\ntaxonomy: tax.json\n",
        );
        let ca = RunConfig::load(Some(&a), &[]).unwrap();
        let cb = RunConfig::load(Some(&b), &[]).unwrap();
        let t = ca.load_taxonomy().unwrap();
        let tok = Tokenizer::default();
        assert_eq!(ca.fingerprint(&t, &tok), cb.fingerprint(&t, &tok));

        let cc = RunConfig::load(Some(&a), &["annotators.0.filter_threshold=0.2".into()]).unwrap();
        assert_ne!(ca.fingerprint(&t, &tok), cc.fingerprint(&t, &tok));
        assert_ne!(
            ca.fingerprint(&t, &tok),
            ca.fingerprint(&t, &Tokenizer::without_stopwords())
        );
    }
}
