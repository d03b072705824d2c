//! Jensen-Shannon distance and the divergence filter.

use super::AnnotationVector;

/// Tolerance on `Σ p = 1` when validating distribution inputs.
const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DivergenceError {
    #[error("distribution lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty distribution")]
    Empty,
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
}

fn check_distribution(p: &[f64]) -> Result<(), DivergenceError> {
    if p.is_empty() {
        return Err(DivergenceError::Empty);
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(DivergenceError::NotADistribution(format!("entry {x}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(DivergenceError::NotADistribution(format!("sums to {sum}")));
    }
    Ok(())
}

/// Jensen-Shannon distance: the square root of the base-2 Jensen-Shannon
/// divergence, a metric bounded by 1.
pub fn js_distance(p: &[f64], q: &[f64]) -> Result<f64, DivergenceError> {
    if p.len() != q.len() {
        return Err(DivergenceError::LengthMismatch(p.len(), q.len()));
    }
    check_distribution(p)?;
    check_distribution(q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let mi = 0.5 * (pi + qi);
        let term = |x: f64| if x > 0.0 { x * (x / mi).log2() } else { 0.0 };
        // one addition per index keeps d(p, q) == d(q, p) bit for bit
        acc += term(pi) + term(qi);
    }
    Ok((0.5 * acc).clamp(0.0, 1.0).sqrt())
}

pub fn uniform(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

/// Distance of an annotated vector from the uniform distribution over its labels.
pub fn distance_from_uniform(v: &AnnotationVector) -> Option<f64> {
    if !v.is_annotated() {
        return None;
    }
    js_distance(&v.probs, &uniform(v.m())).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub vector: AnnotationVector,
    /// Distance from uniform; `None` when the input was already unannotated.
    pub divergence: Option<f64>,
    pub filtered: bool,
}

/// Marks near-uniform annotations as unannotated: a vector whose distance
/// from uniform is below `delta` carries no usable signal.
pub fn filter_by_divergence(v: &AnnotationVector, delta: f64) -> FilterOutcome {
    match distance_from_uniform(v) {
        None => FilterOutcome {
            vector: v.clone(),
            divergence: None,
            filtered: false,
        },
        Some(d) if d < delta => FilterOutcome {
            vector: AnnotationVector::unannotated(v.m()),
            divergence: Some(d),
            filtered: true,
        },
        Some(d) => FilterOutcome {
            vector: v.clone(),
            divergence: Some(d),
            filtered: false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(js_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!((js_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        // closed form: JSD = 0.311278, distance 0.557923
        assert!((js_distance(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - 0.557_923_045_284_143_8).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(matches!(
            js_distance(&[1.0], &[0.5, 0.5]),
            Err(DivergenceError::LengthMismatch(1, 2))
        ));
        assert!(matches!(
            js_distance(&[0.5, 0.6], &[0.5, 0.5]),
            Err(DivergenceError::NotADistribution(_))
        ));
        assert!(matches!(
            js_distance(&[1.5, -0.5], &[0.5, 0.5]),
            Err(DivergenceError::NotADistribution(_))
        ));
        assert!(matches!(js_distance(&[], &[]), Err(DivergenceError::Empty)));
    }

    #[test]
    fn filter_examples() {
        let uniform3 = AnnotationVector::annotated(vec![1.0 / 3.0; 3]);
        let out = filter_by_divergence(&uniform3, 0.01);
        assert!(out.filtered && !out.vector.is_annotated());
        assert_eq!(out.divergence, Some(0.0));

        let onehot = AnnotationVector::annotated(vec![1.0, 0.0]);
        let out = filter_by_divergence(&onehot, 0.1);
        assert!(!out.filtered && out.vector.is_annotated());
        assert!((out.divergence.unwrap() - 0.557_923_045_284_143_8).abs() < 1e-12);

        // brute-force value for (0.75, 0.25) against uniform: 0.220896
        let skewed = AnnotationVector::annotated(vec![0.75, 0.25]);
        let out = filter_by_divergence(&skewed, 0.3);
        assert!(out.filtered);
        assert!((out.divergence.unwrap() - 0.220_895_768_849_017_35).abs() < 1e-12);

        let none = AnnotationVector::unannotated(2);
        let out = filter_by_divergence(&none, 0.5);
        assert_eq!(out.vector, none);
        assert_eq!(out.divergence, None);
    }
}
