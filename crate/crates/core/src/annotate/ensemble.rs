//! Combining annotator outputs into one vector.

use serde::{Deserialize, Serialize};

use super::AnnotationVector;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// Elementwise mean of the non-abstaining vectors.
    #[default]
    Average,
    /// One vote per non-abstaining annotator for its argmax.
    Vote,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("annotation vector has length {found}, expected {expected}")]
pub struct LengthMismatch {
    pub expected: usize,
    pub found: usize,
}

/// Combines vectors of length `m`. Unannotated inputs abstain; with no
/// remaining voters the result is unannotated.
pub fn ensemble(
    vectors: &[AnnotationVector],
    mode: EnsembleMode,
    m: usize,
) -> Result<AnnotationVector, LengthMismatch> {
    if let Some(bad) = vectors.iter().find(|v| v.m() != m) {
        return Err(LengthMismatch {
            expected: m,
            found: bad.m(),
        });
    }
    let voters: Vec<&AnnotationVector> = vectors.iter().filter(|v| v.is_annotated()).collect();
    if voters.is_empty() {
        return Ok(AnnotationVector::unannotated(m));
    }
    let mut acc = vec![0.0; m];
    match mode {
        EnsembleMode::Average => {
            for v in &voters {
                for (a, p) in acc.iter_mut().zip(&v.probs) {
                    *a += p;
                }
            }
            let n = voters.len() as f64;
            acc.iter_mut().for_each(|a| *a /= n);
        }
        EnsembleMode::Vote => {
            for v in &voters {
                let best = v.argmax().expect("voter is annotated");
                acc[best.index()] += 1.0;
            }
        }
    }
    Ok(AnnotationVector::from_scores(acc))
}
