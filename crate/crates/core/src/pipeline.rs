//! End-to-end analysis of one project version: checkout, enumerate,
//! extract, annotate, aggregate, persist.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::aggregate::{annotate_packages, annotate_project};
use crate::annotate::{annotate_file, FileAnnotation};
use crate::config::{ConfigError, OutputBackend, RunConfig};
use crate::extract::{decode_lossy, extract_file, Tokenizer};
use crate::ingest::{
    checkout, derive_package, enumerate_files, resolve_head, CommitSha, IngestError,
    ProjectDescriptor, SourceFileRef, VersionRef,
};
use crate::persist::{relational_from_env, AnalysisResult, JsonStore, PersistError, ResultStore};
use crate::taxonomy::{KeywordIndex, Taxonomy};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

impl PipelineError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Ingest(_) => 2,
            PipelineError::Persist(_) => 3,
        }
    }
}

/// Files processed so far out of the total for the current run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub done: usize,
    pub total: usize,
}

pub type ProgressFn<'a> = &'a (dyn Fn(Progress) + Sync);

fn no_progress(_: Progress) {}

/// A loaded configuration, ready to analyze any number of projects.
pub struct Analyzer {
    config: RunConfig,
    taxonomy: Taxonomy,
    index: KeywordIndex,
    tokenizer: Tokenizer,
    fingerprint: String,
    pool: rayon::ThreadPool,
}

impl Analyzer {
    pub fn new(config: RunConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let taxonomy = config.load_taxonomy()?;
        let tokenizer = config.load_tokenizer()?;
        let index = KeywordIndex::build(&taxonomy);
        let fingerprint = config.fingerprint(&taxonomy, &tokenizer);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .expect("thread pool builds");
        Ok(Analyzer {
            config,
            taxonomy,
            index,
            tokenizer,
            fingerprint,
            pool,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Opens every configured backend. The relational backend is skipped
    /// with a warning when `AUTOFL_DB_URL` is unset.
    pub fn open_stores(&self) -> Result<Vec<Box<dyn ResultStore>>, PersistError> {
        let mut stores: Vec<Box<dyn ResultStore>> = Vec::new();
        for backend in &self.config.outputs {
            match backend {
                OutputBackend::Json => {
                    stores.push(Box::new(JsonStore::new(&self.config.output_dir)));
                }
                OutputBackend::Relational => match relational_from_env()? {
                    Some(store) => stores.push(Box::new(store)),
                    None => tracing::warn!("relational output requested but AUTOFL_DB_URL is unset"),
                },
            }
        }
        Ok(stores)
    }

    /// Checks out `sha` (the remote HEAD when `None`) under `workdir` and
    /// analyzes it. Nothing is persisted.
    pub fn analyze_remote(
        &self,
        project: &ProjectDescriptor,
        sha: Option<&CommitSha>,
        workdir: &Path,
        progress: Option<ProgressFn<'_>>,
    ) -> Result<AnalysisResult, PipelineError> {
        let start = Instant::now();
        let sha = match sha {
            Some(s) => s.clone(),
            None => resolve_head(&project.remote_url)?,
        };
        let tree = checkout(project, &sha, workdir)?;
        let checkout_ms = start.elapsed().as_millis() as u64;
        let mut result = self.analyze_tree(project, tree.version, &tree.root, progress)?;
        if self.config.record_timings {
            result.timings.insert("checkout".into(), checkout_ms);
        }
        Ok(result)
    }

    /// Analyzes an already materialized source tree.
    pub fn analyze_tree(
        &self,
        project: &ProjectDescriptor,
        version: VersionRef,
        root: &Path,
        progress: Option<ProgressFn<'_>>,
    ) -> Result<AnalysisResult, PipelineError> {
        let progress = progress.unwrap_or(&no_progress);
        let mut timings = BTreeMap::new();

        let t = Instant::now();
        let files = enumerate_files(root, project.language, &self.config.ignore)?;
        timings.insert("enumerate".to_string(), t.elapsed().as_millis() as u64);
        tracing::info!(project = %project.name, files = files.len(), "enumerated source files");

        let t = Instant::now();
        let total = files.len();
        progress(Progress { done: 0, total });
        let done = AtomicUsize::new(0);
        let mut annotated: Vec<FileAnnotation> = self.pool.install(|| {
            files
                .into_par_iter()
                .filter_map(|f| {
                    let out = self.annotate_one(root, project, f);
                    let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                    progress(Progress { done: n, total });
                    out
                })
                .collect()
        });
        annotated.sort_by(|a, b| a.file.path.cmp(&b.file.path));
        timings.insert("annotate".to_string(), t.elapsed().as_millis() as u64);

        let t = Instant::now();
        let m = self.taxonomy.m();
        let packages = annotate_packages(&annotated, m);
        let project_annotation = annotate_project(&annotated, m);
        timings.insert("aggregate".to_string(), t.elapsed().as_millis() as u64);

        let mut descriptor = project.clone();
        descriptor.versions = vec![version.clone()];
        Ok(AnalysisResult {
            project: descriptor,
            version,
            config_fingerprint: self.fingerprint.clone(),
            config: serde_json::to_value(&self.config).expect("config serializes"),
            files: annotated,
            packages,
            project_annotation,
            timings: if self.config.record_timings {
                timings
            } else {
                BTreeMap::new()
            },
            tool_version: crate::TOOL_VERSION.to_string(),
        })
    }

    fn annotate_one(
        &self,
        root: &Path,
        project: &ProjectDescriptor,
        mut file: SourceFileRef,
    ) -> Option<FileAnnotation> {
        let full = root.join(&file.path);
        let bytes = match std::fs::read(&full) {
            Ok(b) => b,
            Err(e) => {
                tracing::warn!(path = %full.display(), error = %e, "unreadable file skipped");
                return None;
            }
        };
        let content = decode_lossy(&bytes);
        let path_terms = self.config.path_terms.then_some(file.path.as_str());
        let extracted = extract_file(&content, project.language, &self.tokenizer, path_terms);
        file.package = derive_package(
            &file.path,
            project.language,
            extracted.declared_package.as_deref(),
        );
        Some(annotate_file(
            file,
            &extracted.bag,
            extracted.fallback,
            &self.config.annotators,
            self.config.ensemble,
            &self.taxonomy,
            &self.index,
        ))
    }
}

/// Writes `result` to every store and returns their locations.
pub fn persist(
    result: &AnalysisResult,
    stores: &[Box<dyn ResultStore>],
) -> Result<Vec<String>, PersistError> {
    stores.iter().map(|s| s.write(result)).collect()
}
