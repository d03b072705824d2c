//! Post-filter refinement of a label distribution.

use serde::{Deserialize, Serialize};

use super::AnnotationVector;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Transform {
    /// One-hot at the most likely label (lowest id on ties).
    #[default]
    Argmax,
    /// Keep the `k` most likely labels and renormalize.
    TopK { k: usize },
    /// Keep labels with probability at least `p_min` and renormalize.
    Threshold { p_min: f64 },
}

pub fn transform(v: &AnnotationVector, mode: Transform) -> AnnotationVector {
    if !v.is_annotated() {
        return v.clone();
    }
    let m = v.m();
    match mode {
        Transform::Argmax => {
            let best = v.argmax().expect("annotated vector has an argmax");
            let mut probs = vec![0.0; m];
            probs[best.index()] = 1.0;
            AnnotationVector::annotated(probs)
        }
        Transform::TopK { k } => {
            let mut probs = vec![0.0; m];
            for ranked in v.top_labels().into_iter().take(k) {
                probs[ranked.label.index()] = ranked.prob;
            }
            AnnotationVector::from_scores(probs)
        }
        Transform::Threshold { p_min } => {
            let probs = v
                .probs
                .iter()
                .map(|&p| if p < p_min { 0.0 } else { p })
                .collect();
            AnnotationVector::from_scores(probs)
        }
    }
}
