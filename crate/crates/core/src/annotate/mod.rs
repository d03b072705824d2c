//! File annotation: each annotator runs LF, divergence filter and transform;
//! the surviving outputs are then ensembled into the file's vector.

pub mod divergence;
pub mod ensemble;
pub mod lf;
pub mod transform;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use divergence::{distance_from_uniform, filter_by_divergence, js_distance, DivergenceError};
pub use ensemble::{ensemble, EnsembleMode, LengthMismatch};
pub use lf::{lf_keyword_tfidf, lf_similarity, LabellingFunction};
pub use transform::{transform, Transform};

use crate::extract::TermBag;
use crate::ingest::SourceFileRef;
use crate::taxonomy::{KeywordIndex, LabelId, Taxonomy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Annotated,
    Unannotated,
}

/// Probability distribution over the taxonomy's labels, or the all-zero
/// unannotated sentinel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationVector {
    pub status: Status,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedLabel {
    pub label: LabelId,
    pub prob: f64,
}

/// Labels with non-zero probability, most likely first, lowest id on ties.
pub fn rank_labels(probs: &[f64]) -> Vec<RankedLabel> {
    let mut ranked: Vec<RankedLabel> = probs
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, &prob)| RankedLabel {
            label: LabelId(i as u32),
            prob,
        })
        .collect();
    ranked.sort_by(|a, b| b.prob.total_cmp(&a.prob).then(a.label.cmp(&b.label)));
    ranked
}

impl AnnotationVector {
    pub fn unannotated(m: usize) -> Self {
        AnnotationVector {
            status: Status::Unannotated,
            probs: vec![0.0; m],
        }
    }

    /// Wraps probabilities that already form a distribution.
    pub fn annotated(probs: Vec<f64>) -> Self {
        AnnotationVector {
            status: Status::Annotated,
            probs,
        }
    }

    /// Normalizes non-negative scores into a distribution; an all-zero score
    /// vector is unannotated.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let total: f64 = scores.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Self::unannotated(scores.len());
        }
        Self::annotated(scores.into_iter().map(|s| s / total).collect())
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn is_annotated(&self) -> bool {
        self.status == Status::Annotated
    }

    pub fn argmax(&self) -> Option<LabelId> {
        if !self.is_annotated() {
            return None;
        }
        rank_labels(&self.probs).first().map(|r| r.label)
    }

    pub fn top_labels(&self) -> Vec<RankedLabel> {
        if self.is_annotated() {
            rank_labels(&self.probs)
        } else {
            Vec::new()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfKind {
    KeywordTfidf,
    Similarity,
}

fn default_filter_threshold() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorConfig {
    pub name: String,
    pub kind: LfKind,
    /// Minimum Jensen-Shannon distance from uniform for an annotation to be kept.
    #[serde(default = "default_filter_threshold")]
    pub filter_threshold: f64,
    #[serde(default)]
    pub transform: Transform,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnnotatorConfigError {
    #[error("annotator `{0}`: filter_threshold must lie in [0, 1]")]
    Threshold(String),
    #[error("annotator `{0}`: top_k needs k >= 1")]
    TopK(String),
    #[error("annotator `{0}`: threshold p_min must lie in (0, 1)")]
    PMin(String),
    #[error("annotator name `{0}` is empty or used twice")]
    Name(String),
    #[error("at least one annotator is required")]
    NoAnnotators,
}

impl AnnotatorConfig {
    pub fn keyword(name: &str) -> Self {
        AnnotatorConfig {
            name: name.into(),
            kind: LfKind::KeywordTfidf,
            filter_threshold: default_filter_threshold(),
            transform: Transform::Argmax,
        }
    }

    pub fn validate(&self) -> Result<(), AnnotatorConfigError> {
        if !(0.0..=1.0).contains(&self.filter_threshold) {
            return Err(AnnotatorConfigError::Threshold(self.name.clone()));
        }
        match self.transform {
            Transform::TopK { k } if k < 1 => Err(AnnotatorConfigError::TopK(self.name.clone())),
            Transform::Threshold { p_min } if !(p_min > 0.0 && p_min < 1.0) => {
                Err(AnnotatorConfigError::PMin(self.name.clone()))
            }
            _ => Ok(()),
        }
    }
}

pub fn validate_annotators(cfgs: &[AnnotatorConfig]) -> Result<(), AnnotatorConfigError> {
    if cfgs.is_empty() {
        return Err(AnnotatorConfigError::NoAnnotators);
    }
    let mut seen = std::collections::BTreeSet::new();
    for cfg in cfgs {
        if cfg.name.is_empty() || !seen.insert(cfg.name.as_str()) {
            return Err(AnnotatorConfigError::Name(cfg.name.clone()));
        }
        cfg.validate()?;
    }
    Ok(())
}

/// Why an annotator produced no annotation for a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abstention {
    /// The LF scored every label 0.
    NoSignal,
    /// The LF output was too close to uniform.
    Filtered,
    /// The threshold transform removed every label.
    Transform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorOutcome {
    pub vector: AnnotationVector,
    /// Distance of the raw LF output from uniform.
    pub divergence: Option<f64>,
    pub abstention: Option<Abstention>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileAnnotation {
    pub file: SourceFileRef,
    pub per_annotator: BTreeMap<String, AnnotatorOutcome>,
    pub ensemble: AnnotationVector,
    pub top_labels: Vec<RankedLabel>,
    /// Distance of the ensemble vector from uniform; present iff annotated.
    pub jsd: Option<f64>,
    pub fallback: bool,
}

impl FileAnnotation {
    pub fn is_annotated(&self) -> bool {
        self.ensemble.is_annotated()
    }

    /// True when at least one annotator was silenced by the divergence filter.
    pub fn was_filtered(&self) -> bool {
        self.per_annotator
            .values()
            .any(|o| o.abstention == Some(Abstention::Filtered))
    }
}

/// Runs one annotator: LF, then divergence filter, then transform.
pub fn run_annotator(
    cfg: &AnnotatorConfig,
    bag: &TermBag,
    taxonomy: &Taxonomy,
    index: &KeywordIndex,
) -> AnnotatorOutcome {
    let raw = match cfg.kind {
        LfKind::KeywordTfidf => lf_keyword_tfidf(bag, index, taxonomy),
        LfKind::Similarity => lf_similarity(bag, taxonomy),
    };
    if !raw.is_annotated() {
        return AnnotatorOutcome {
            vector: raw,
            divergence: None,
            abstention: Some(Abstention::NoSignal),
        };
    }
    let filtered = filter_by_divergence(&raw, cfg.filter_threshold);
    if filtered.filtered {
        return AnnotatorOutcome {
            vector: filtered.vector,
            divergence: filtered.divergence,
            abstention: Some(Abstention::Filtered),
        };
    }
    let vector = transform(&filtered.vector, cfg.transform);
    let abstention = (!vector.is_annotated()).then_some(Abstention::Transform);
    AnnotatorOutcome {
        vector,
        divergence: filtered.divergence,
        abstention,
    }
}

pub fn annotate_file(
    file: SourceFileRef,
    bag: &TermBag,
    fallback: bool,
    cfgs: &[AnnotatorConfig],
    mode: EnsembleMode,
    taxonomy: &Taxonomy,
    index: &KeywordIndex,
) -> FileAnnotation {
    let m = taxonomy.m();
    let per_annotator: BTreeMap<String, AnnotatorOutcome> = cfgs
        .iter()
        .map(|cfg| (cfg.name.clone(), run_annotator(cfg, bag, taxonomy, index)))
        .collect();
    // run in config order so vote/average see the same sequence every time
    let vectors: Vec<AnnotationVector> = cfgs
        .iter()
        .map(|cfg| per_annotator[&cfg.name].vector.clone())
        .collect();
    let combined = ensemble(&vectors, mode, m).expect("annotator outputs have length m");
    FileAnnotation {
        file,
        top_labels: combined.top_labels(),
        jsd: distance_from_uniform(&combined),
        ensemble: combined,
        per_annotator,
        fallback,
    }
}
