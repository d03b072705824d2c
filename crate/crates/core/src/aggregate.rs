//! Package- and project-level roll-ups of file annotations.
//!
//! Both levels average the ensemble vectors of annotated files only; the
//! project mean is file-weighted, not a mean of package means.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::annotate::{AnnotationVector, FileAnnotation, RankedLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackageAnnotation {
    pub package: String,
    pub vector: AnnotationVector,
    pub n_files: usize,
    pub n_annotated: usize,
    pub top_labels: Vec<RankedLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectAnnotation {
    pub vector: AnnotationVector,
    pub n_files: usize,
    pub n_annotated: usize,
    pub top_labels: Vec<RankedLabel>,
}

/// Mean of the annotated ensemble vectors, renormalized. Files are summed
/// in (path, package) order so the result does not depend on input order
/// down to the last bit. Returns the vector and the number of contributors.
fn mean_of_annotated(files: &[FileAnnotation], m: usize) -> (AnnotationVector, usize) {
    let mut annotated: Vec<&FileAnnotation> = files.iter().filter(|f| f.is_annotated()).collect();
    annotated.sort_by(|a, b| {
        (&a.file.path, &a.file.package)
            .cmp(&(&b.file.path, &b.file.package))
            .then_with(|| {
                a.ensemble
                    .probs
                    .iter()
                    .zip(&b.ensemble.probs)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    });
    let n = annotated.len();
    if n == 0 {
        return (AnnotationVector::unannotated(m), 0);
    }
    let mut acc = vec![0.0; m];
    for f in annotated {
        for (a, p) in acc.iter_mut().zip(&f.ensemble.probs) {
            *a += p;
        }
    }
    acc.iter_mut().for_each(|a| *a /= n as f64);
    (AnnotationVector::from_scores(acc), n)
}

/// Averages the files of a single package. `m` is the taxonomy size, used
/// when `files` is empty.
pub fn annotate_package(package: &str, files: &[FileAnnotation], m: usize) -> PackageAnnotation {
    let (vector, n_annotated) = mean_of_annotated(files, m);
    PackageAnnotation {
        package: package.to_string(),
        top_labels: vector.top_labels(),
        vector,
        n_files: files.len(),
        n_annotated,
    }
}

/// Groups files by package and annotates every package, including those
/// with no annotated file. Output is sorted by package id.
pub fn annotate_packages(files: &[FileAnnotation], m: usize) -> Vec<PackageAnnotation> {
    let mut groups: BTreeMap<&str, Vec<FileAnnotation>> = BTreeMap::new();
    for f in files {
        groups.entry(f.file.package.as_str()).or_default().push(f.clone());
    }
    groups
        .into_iter()
        .map(|(pkg, members)| annotate_package(pkg, &members, m))
        .collect()
}

pub fn annotate_project(files: &[FileAnnotation], m: usize) -> ProjectAnnotation {
    let (vector, n_annotated) = mean_of_annotated(files, m);
    ProjectAnnotation {
        top_labels: vector.top_labels(),
        vector,
        n_files: files.len(),
        n_annotated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SourceFileRef;

    pub(crate) fn fa(pkg: &str, path: &str, v: AnnotationVector) -> FileAnnotation {
        FileAnnotation {
            file: SourceFileRef {
                path: path.into(),
                package: pkg.into(),
                size_bytes: 0,
            },
            per_annotator: Default::default(),
            top_labels: v.top_labels(),
            jsd: None,
            ensemble: v,
            fallback: false,
        }
    }

    fn on(p: &[f64]) -> AnnotationVector {
        AnnotationVector::annotated(p.to_vec())
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn package_examples() {
        let p = annotate_package("p", &[fa("p", "a", on(&[0.8, 0.2])), fa("p", "b", on(&[0.4, 0.6]))], 2);
        assert!(close(&p.vector.probs, &[0.6, 0.4]));
        assert_eq!((p.n_files, p.n_annotated), (2, 2));

        let p = annotate_package(
            "p",
            &[fa("p", "a", on(&[1.0, 0.0])), fa("p", "b", AnnotationVector::unannotated(2))],
            2,
        );
        assert_eq!(p.vector.probs, [1.0, 0.0]);
        assert_eq!(p.n_annotated, 1);

        let p = annotate_package("p", &[fa("p", "a", AnnotationVector::unannotated(2))], 2);
        assert!(!p.vector.is_annotated());
        assert_eq!((p.n_files, p.n_annotated), (1, 0));
        assert!(p.top_labels.is_empty());
    }

    #[test]
    fn project_examples() {
        let files = [
            fa("a", "1", on(&[1.0, 0.0])),
            fa("a", "2", on(&[1.0, 0.0])),
            fa("b", "3", on(&[0.0, 1.0])),
        ];
        let p = annotate_project(&files, 2);
        assert!(close(&p.vector.probs, &[2.0 / 3.0, 1.0 / 3.0]));
        assert!(!annotate_project(&[], 2).vector.is_annotated());
        let single = annotate_project(&[fa("", "x", on(&[0.3, 0.7]))], 2);
        assert_eq!(single.vector.probs, [0.3, 0.7]);
    }

    #[test]
    fn packages_keep_unannotated_groups() {
        let files = [
            fa("a", "a/1", on(&[1.0, 0.0])),
            fa("b", "b/2", AnnotationVector::unannotated(2)),
        ];
        let pkgs = annotate_packages(&files, 2);
        assert_eq!(pkgs.len(), 2);
        assert_eq!(pkgs[1].package, "b");
        assert!(!pkgs[1].vector.is_annotated());
    }
}
