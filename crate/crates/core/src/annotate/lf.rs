//! Labelling functions: term bag to label distribution.

use super::AnnotationVector;
use crate::extract::TermBag;
use crate::taxonomy::{KeywordIndex, Taxonomy};

/// A labelling function maps a file's term bag to a distribution over the
/// taxonomy's labels, or abstains with an unannotated vector.
pub trait LabellingFunction: Send + Sync {
    fn label(&self, bag: &TermBag) -> AnnotationVector;
}

/// Keyword-hit scoring with TF-IDF weighting:
/// `score(l) = Σ_{u ∈ bag ∩ keywords(l)} tf(u) · idf(u) · weight(l, u)`.
pub fn lf_keyword_tfidf(bag: &TermBag, index: &KeywordIndex, taxonomy: &Taxonomy) -> AnnotationVector {
    let mut scores = vec![0.0; taxonomy.m()];
    for (term, tf) in bag.iter() {
        let (Some(posts), Some(idf)) = (index.postings(term), index.idf(term)) else {
            continue;
        };
        for &(label, weight) in posts {
            scores[label.index()] += tf as f64 * idf * weight;
        }
    }
    AnnotationVector::from_scores(scores)
}

/// Cosine similarity between the bag's raw counts and each label's keyword
/// weight vector, normalized into a distribution.
pub fn lf_similarity(bag: &TermBag, taxonomy: &Taxonomy) -> AnnotationVector {
    let bag_norm = bag
        .iter()
        .map(|(_, c)| (c as f64) * (c as f64))
        .sum::<f64>()
        .sqrt();
    let sims = taxonomy
        .labels()
        .iter()
        .map(|label| {
            let label_norm = label.keyword_norm();
            if bag_norm == 0.0 || label_norm == 0.0 {
                return 0.0;
            }
            let dot: f64 = label
                .keywords
                .iter()
                .map(|(term, w)| bag.count(term) as f64 * w)
                .sum();
            dot / (bag_norm * label_norm)
        })
        .collect();
    AnnotationVector::from_scores(sims)
}

pub struct KeywordTfidf<'a> {
    pub taxonomy: &'a Taxonomy,
    pub index: &'a KeywordIndex,
}

impl LabellingFunction for KeywordTfidf<'_> {
    fn label(&self, bag: &TermBag) -> AnnotationVector {
        lf_keyword_tfidf(bag, self.index, self.taxonomy)
    }
}

pub struct KeywordSimilarity<'a> {
    pub taxonomy: &'a Taxonomy,
}

impl LabellingFunction for KeywordSimilarity<'_> {
    fn label(&self, bag: &TermBag) -> AnnotationVector {
        lf_similarity(bag, self.taxonomy)
    }
}
