//! Ranking metrics against ground-truth label sets.
//!
//! `success_rate_proxy@k` is an automatic hit test (is any top-k label in
//! the truth set?). It is not a human judgement and is named accordingly in
//! every report.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::annotate::RankedLabel;
use crate::persist::AnalysisResult;
use crate::taxonomy::{LabelId, Taxonomy};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("ground-truth label set is empty")]
    EmptyTruth,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("ranked list contains label {0} twice")]
    DuplicateRank(LabelId),
    #[error("ground truth line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn check(ranked: &[LabelId], truth: &BTreeSet<LabelId>, k: usize) -> Result<(), EvalError> {
    if truth.is_empty() {
        return Err(EvalError::EmptyTruth);
    }
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    let mut seen = BTreeSet::new();
    if let Some(dup) = ranked.iter().find(|id| !seen.insert(**id)) {
        return Err(EvalError::DuplicateRank(*dup));
    }
    Ok(())
}

/// `|top-k ∩ truth| / |truth|`.
pub fn recall_at_k(ranked: &[LabelId], truth: &BTreeSet<LabelId>, k: usize) -> Result<f64, EvalError> {
    check(ranked, truth, k)?;
    let hits = ranked.iter().take(k).filter(|id| truth.contains(id)).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// 1 if any of the top-k labels is in the truth set, else 0.
pub fn success_rate_at_k(
    ranked: &[LabelId],
    truth: &BTreeSet<LabelId>,
    k: usize,
) -> Result<f64, EvalError> {
    check(ranked, truth, k)?;
    Ok(if ranked.iter().take(k).any(|id| truth.contains(id)) {
        1.0
    } else {
        0.0
    })
}

pub fn ranked_ids(labels: &[RankedLabel]) -> Vec<LabelId> {
    labels.iter().map(|r| r.label).collect()
}

/// True label sets per project, and optionally per package or file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub projects: BTreeMap<String, BTreeSet<LabelId>>,
    /// `(project, package id)` to labels.
    pub packages: BTreeMap<(String, String), BTreeSet<LabelId>>,
    /// `(project, file path)` to labels.
    pub files: BTreeMap<(String, String), BTreeSet<LabelId>>,
}

fn resolve_labels(field: &str, taxonomy: &Taxonomy, line: usize) -> Result<BTreeSet<LabelId>, EvalError> {
    field
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            taxonomy.id_of(name).ok_or_else(|| EvalError::Parse {
                line,
                message: format!("unknown label `{name}`"),
            })
        })
        .collect()
}

fn csv_records(reader: impl Read) -> Vec<(usize, Result<csv::StringRecord, csv::Error>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    rdr.records()
        .enumerate()
        .map(|(i, r)| {
            let line = r
                .as_ref()
                .ok()
                .and_then(|rec| rec.position().map(|p| p.line() as usize))
                .unwrap_or(i + 1);
            (line, r)
        })
        .collect()
}

impl GroundTruth {
    /// Project truth: CSV rows `name,label_name[;label_name...]`, names
    /// resolved case-insensitively through the taxonomy.
    pub fn read_projects(reader: impl Read, taxonomy: &Taxonomy) -> Result<Self, EvalError> {
        let mut gt = GroundTruth::default();
        for (i, (line, rec)) in csv_records(reader).into_iter().enumerate() {
            let rec = rec.map_err(|e| EvalError::Parse {
                line,
                message: e.to_string(),
            })?;
            if i == 0 && rec.get(0) == Some("name") {
                continue;
            }
            if rec.len() != 2 {
                return Err(EvalError::Parse {
                    line,
                    message: format!("expected 2 fields, found {}", rec.len()),
                });
            }
            gt.projects
                .insert(rec[0].to_string(), resolve_labels(&rec[1], taxonomy, line)?);
        }
        Ok(gt)
    }

    /// Package or file truth: CSV rows `name,target,label_name[;...]`.
    pub fn read_scoped(
        &mut self,
        reader: impl Read,
        taxonomy: &Taxonomy,
        scope: Scope,
    ) -> Result<(), EvalError> {
        for (i, (line, rec)) in csv_records(reader).into_iter().enumerate() {
            let rec = rec.map_err(|e| EvalError::Parse {
                line,
                message: e.to_string(),
            })?;
            if i == 0 && rec.get(0) == Some("name") {
                continue;
            }
            if rec.len() != 3 {
                return Err(EvalError::Parse {
                    line,
                    message: format!("expected 3 fields, found {}", rec.len()),
                });
            }
            let key = (rec[0].to_string(), rec[1].to_string());
            let labels = resolve_labels(&rec[2], taxonomy, line)?;
            match scope {
                Scope::Package => self.packages.insert(key, labels),
                Scope::File => self.files.insert(key, labels),
            };
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Package,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Project,
    Package,
    File,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Project => "project",
            Level::Package => "package",
            Level::File => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub level: Level,
    /// `recall@k` or `success_rate_proxy@k`.
    pub metric: String,
    pub k: usize,
    pub mean: f64,
    /// Number of evaluated items.
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rows: Vec<MetricRow>,
    /// Projects skipped for lack of ground truth.
    pub skipped: Vec<String>,
}

impl MetricsReport {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn mean(&self, level: Level, metric: &str, k: usize) -> Option<f64> {
        let name = format!("{metric}@{k}");
        self.rows
            .iter()
            .find(|r| r.level == level && r.k == k && r.metric == name)
            .map(|r| r.mean)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,metric,k,mean,n\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{}\n",
                r.level.as_str(),
                r.metric,
                r.k,
                r.mean,
                r.n
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        crate::persist::canonical::to_canonical_string(self).expect("report serializes")
    }
}

fn push_rows(
    report: &mut MetricsReport,
    level: Level,
    items: &[(Vec<LabelId>, &BTreeSet<LabelId>)],
    ks: &[usize],
) -> Result<(), EvalError> {
    if items.is_empty() {
        return Ok(());
    }
    for &k in ks {
        let mut recall = 0.0;
        let mut success = 0.0;
        for (ranked, truth) in items {
            recall += recall_at_k(ranked, truth, k)?;
            success += success_rate_at_k(ranked, truth, k)?;
        }
        let n = items.len();
        report.rows.push(MetricRow {
            level,
            metric: format!("recall@{k}"),
            k,
            mean: recall / n as f64,
            n,
        });
        report.rows.push(MetricRow {
            level,
            metric: format!("success_rate_proxy@{k}"),
            k,
            mean: success / n as f64,
            n,
        });
    }
    Ok(())
}

/// Mean metrics per level. Results whose project has no ground truth are
/// skipped and listed in the report.
pub fn evaluate_corpus(
    results: &[AnalysisResult],
    gt: &GroundTruth,
    ks: &[usize],
) -> Result<MetricsReport, EvalError> {
    let mut report = MetricsReport::default();
    if results.is_empty() {
        tracing::warn!("no results to evaluate");
    }
    let mut project_items = Vec::new();
    let mut package_items = Vec::new();
    let mut file_items = Vec::new();
    for r in results {
        let name = &r.project.name;
        let Some(truth) = gt.projects.get(name).filter(|t| !t.is_empty()) else {
            tracing::warn!(project = %name, "no ground truth; skipped");
            report.skipped.push(name.clone());
            continue;
        };
        project_items.push((ranked_ids(&r.project_annotation.top_labels), truth));
        for p in &r.packages {
            if let Some(t) = gt.packages.get(&(name.clone(), p.package.clone())) {
                package_items.push((ranked_ids(&p.top_labels), t));
            }
        }
        for f in &r.files {
            if let Some(t) = gt.files.get(&(name.clone(), f.file.path.clone())) {
                file_items.push((ranked_ids(&f.top_labels), t));
            }
        }
    }
    push_rows(&mut report, Level::Project, &project_items, ks)?;
    push_rows(&mut report, Level::Package, &package_items, ks)?;
    push_rows(&mut report, Level::File, &file_items, ks)?;
    report.skipped.sort();
    Ok(report)
}
