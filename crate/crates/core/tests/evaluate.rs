mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use repolabel_core::aggregate::ProjectAnnotation;
use repolabel_core::annotate::AnnotationVector;
use repolabel_core::evaluate::{evaluate_corpus, GroundTruth, Level, Scope};
use repolabel_core::ingest::{CommitSha, ProjectDescriptor, VersionRef};
use repolabel_core::persist::AnalysisResult;
use repolabel_core::{LabelId, Language, Taxonomy};

fn taxonomy() -> Taxonomy {
    Taxonomy::load(&common::fixtures().join("widgets_taxonomy.yaml"), None).unwrap()
}

fn result(name: &str, ranking: &[u32]) -> AnalysisResult {
    let mut probs = vec![0.0; 4];
    for (i, id) in ranking.iter().enumerate() {
        probs[*id as usize] = (ranking.len() - i) as f64;
    }
    let vector = AnnotationVector::from_scores(probs);
    AnalysisResult {
        project: ProjectDescriptor {
            name: name.into(),
            remote_url: String::new(),
            language: Language::Java,
            versions: vec![],
        },
        version: VersionRef {
            version_sha: "0123456789abcdef0123456789abcdef01234567".parse::<CommitSha>().unwrap(),
            version_num: 0,
        },
        config_fingerprint: "0000000000000000".into(),
        config: serde_json::Value::Null,
        files: vec![],
        packages: vec![],
        project_annotation: ProjectAnnotation {
            top_labels: vector.top_labels(),
            vector,
            n_files: 1,
            n_annotated: 1,
        },
        timings: BTreeMap::new(),
        tool_version: "test".into(),
    }
}

#[test]
fn ground_truth_csv_resolves_label_names() {
    let t = taxonomy();
    let gt = GroundTruth::read_projects(
        "name,labels\nwidgets,User Interface;image\n# comment\nother,text editor\n".as_bytes(),
        &t,
    )
    .unwrap();
    assert_eq!(gt.projects["widgets"], [LabelId(0), LabelId(1)].into());
    assert_eq!(gt.projects["other"], [LabelId(3)].into());
    assert!(GroundTruth::read_projects("x,no such label\n".as_bytes(), &t).is_err());

    let mut gt = gt;
    gt.read_scoped("widgets,com.example.image,image\n".as_bytes(), &t, Scope::Package)
        .unwrap();
    assert_eq!(gt.packages[&("widgets".into(), "com.example.image".into())], [LabelId(1)].into());
}

#[test]
fn corpus_means() {
    let t = taxonomy();
    let gt = GroundTruth::read_projects("a,user interface\nb,user interface;image\n".as_bytes(), &t).unwrap();
    // a ranks its single true label first; b finds one of its two
    let results = [result("a", &[0, 2]), result("b", &[0, 3]), result("c", &[1])];
    let report = evaluate_corpus(&results, &gt, &[1, 10]).unwrap();
    assert_eq!(report.mean(Level::Project, "recall", 10), Some(0.75));
    assert_eq!(report.mean(Level::Project, "success_rate_proxy", 1), Some(1.0));
    assert_eq!(report.skipped, vec!["c".to_string()]);
    assert!(report.to_csv().contains("project,recall@10,10,0.750000,2\n"));
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn empty_corpus_gives_empty_report() {
    let report = evaluate_corpus(&[], &GroundTruth::default(), &[10]).unwrap();
    assert!(report.is_empty());
}

proptest! {
    #[test]
    fn corpus_metrics_are_permutation_invariant(
        rankings in prop::collection::vec(Just(vec![0u32, 1, 2, 3]).prop_shuffle(), 1..12),
        truths in prop::collection::vec(prop::collection::btree_set(0u32..4, 1..3), 12),
        seed in any::<u64>(),
    ) {
        let mut gt = GroundTruth::default();
        let mut results = Vec::new();
        for (i, r) in rankings.iter().enumerate() {
            let name = format!("p{i}");
            gt.projects.insert(name.clone(), truths[i].iter().map(|&x| LabelId(x)).collect());
            results.push(result(&name, r));
        }
        let base = evaluate_corpus(&results, &gt, &[1, 2, 4]).unwrap();
        let mut shuffled = results.clone();
        use rand::{seq::SliceRandom, SeedableRng};
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let other = evaluate_corpus(&shuffled, &gt, &[1, 2, 4]).unwrap();
        for (a, b) in base.rows.iter().zip(&other.rows) {
            prop_assert!((a.mean - b.mean).abs() < 1e-12);
        }
    }
}
