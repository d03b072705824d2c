//! HTTP API under `/api/v1`. Payloads are fragments of the canonical
//! analysis result, so clients need no transformation layer.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use repolabel_core::aggregate::{PackageAnnotation, ProjectAnnotation};
use repolabel_core::annotate::{RankedLabel, Status};
use repolabel_core::config::{ConfigError, RunConfig};
use repolabel_core::ingest::{validate_project_name, CommitSha, ROOT_PACKAGE_DISPLAY};
use repolabel_core::persist::{AnalysisResult, PersistError, ResultKey, ResultStore};
use repolabel_core::pipeline::{Analyzer, PipelineError};
use repolabel_core::{LabelId, Taxonomy};
use serde::{Deserialize, Serialize};

use crate::jobs::{AnalysisRequest, JobKey, JobQueue, JobStatus, ResultRef, SubmitError};

const DEFAULT_TOP: usize = 10;

/// Startup settings shared by every job.
#[derive(Debug, Clone)]
pub struct ServiceSettings {
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub workdir: PathBuf,
}

impl ServiceSettings {
    /// Base config with the request's overrides layered on top.
    fn run_config(&self, extra: &[String]) -> Result<RunConfig, ConfigError> {
        let mut all = self.overrides.clone();
        all.extend_from_slice(extra);
        RunConfig::load(self.config_path.as_deref(), &all)
    }
}

struct Inner {
    settings: ServiceSettings,
    taxonomy: Taxonomy,
    default_fingerprint: String,
    /// Reads are served from the first store.
    stores: Arc<Vec<Arc<dyn ResultStore>>>,
    queue: JobQueue,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// Loads the base config and starts the worker. `stores` receive every
    /// result; the first one also serves reads.
    pub fn new(
        settings: ServiceSettings,
        stores: Vec<Arc<dyn ResultStore>>,
    ) -> Result<Self, PipelineError> {
        assert!(!stores.is_empty(), "at least one result store");
        let analyzer = Analyzer::new(settings.run_config(&[])?)?;
        let stores = Arc::new(stores);
        let queue = JobQueue::start(Arc::clone(&stores), settings.workdir.clone());
        Ok(AppState(Arc::new(Inner {
            taxonomy: analyzer.taxonomy().clone(),
            default_fingerprint: analyzer.fingerprint().to_string(),
            settings,
            stores,
            queue,
        })))
    }

    /// Uses the backends named by the base config.
    pub fn from_settings(settings: ServiceSettings) -> Result<Self, PipelineError> {
        let analyzer = Analyzer::new(settings.run_config(&[])?)?;
        let stores: Vec<Arc<dyn ResultStore>> =
            analyzer.open_stores()?.into_iter().map(Arc::from).collect();
        if stores.is_empty() {
            return Err(PipelineError::Config(ConfigError::NoOutputs));
        }
        AppState::new(settings, stores)
    }

    pub fn default_fingerprint(&self) -> &str {
        &self.0.default_fingerprint
    }

    fn read_store(&self) -> &dyn ResultStore {
        self.0.stores[0].as_ref()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/analyses", post(submit_analysis))
        .route("/api/v1/analyses/{job_id}", get(job_status))
        .route("/api/v1/projects", get(list_projects))
        .route("/api/v1/projects/{name}/{sha}/project", get(project_view))
        .route("/api/v1/projects/{name}/{sha}/packages", get(packages_view))
        .route("/api/v1/projects/{name}/{sha}/packages/{pkg}/files", get(files_view))
        .route("/api/v1/taxonomy", get(taxonomy_view))
        .with_state(state)
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Conflict { message: String, job_id: String },
    Invalid(String),
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    job_id: Option<&'a str>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message, job_id) = match &self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m, None),
            ApiError::Conflict { message, job_id } => (StatusCode::CONFLICT, message, Some(job_id.as_str())),
            ApiError::Invalid(m) => (StatusCode::UNPROCESSABLE_ENTITY, m, None),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m, None),
        };
        (status, Json(ErrorBody { error: message, job_id })).into_response()
    }
}

impl From<PersistError> for ApiError {
    fn from(e: PersistError) -> Self {
        match e {
            PersistError::NotFound(key) => ApiError::NotFound(format!("no result for {key}")),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
struct SubmitParams {
    #[serde(default)]
    sync: bool,
}

async fn submit_analysis(
    State(state): State<AppState>,
    Query(params): Query<SubmitParams>,
    body: Result<Json<AnalysisRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<JobStatus>), ApiError> {
    let Json(request) = body.map_err(|e| ApiError::Invalid(e.body_text()))?;
    validate_project_name(&request.name).map_err(|e| ApiError::Invalid(e.to_string()))?;
    if request.remote_url.trim().is_empty() {
        return Err(ApiError::Invalid("remote_url must not be empty".into()));
    }
    let config = state
        .0
        .settings
        .run_config(&request.config_overrides)
        .map_err(|e| ApiError::Invalid(e.to_string()))?;
    let taxonomy = config.load_taxonomy().map_err(|e| ApiError::Invalid(e.to_string()))?;
    let tokenizer = config.load_tokenizer().map_err(|e| ApiError::Invalid(e.to_string()))?;
    let fingerprint = config.fingerprint(&taxonomy, &tokenizer);
    let key = JobKey {
        name: request.name.clone(),
        revision: request.sha.as_ref().map_or_else(|| "HEAD".to_string(), |s| s.to_string()),
        config_fingerprint: fingerprint.clone(),
    };

    if let Some(sha) = &request.sha {
        let stored = ResultKey {
            name: request.name.clone(),
            sha: sha.clone(),
            config_fingerprint: fingerprint.clone(),
        };
        if state.read_store().read(&stored).is_ok() {
            let status = state.0.queue.record_cached(
                key,
                ResultRef {
                    name: stored.name,
                    version_sha: stored.sha,
                    config_fingerprint: fingerprint,
                    locations: vec![],
                    cached: true,
                },
            );
            return Ok((StatusCode::OK, Json(status)));
        }
    }

    let (notify, wait) = if params.sync {
        let (tx, rx) = tokio::sync::oneshot::channel();
        (Some(tx), Some(rx))
    } else {
        (None, None)
    };
    let queued = state
        .0
        .queue
        .submit(key, request, config, notify)
        .map_err(|e| {
            let message = e.to_string();
            match e {
                SubmitError::InFlight(job_id) => ApiError::Conflict { message, job_id },
            }
        })?;
    match wait {
        Some(rx) => {
            let status = rx
                .await
                .map_err(|_| ApiError::Internal("analysis worker stopped".into()))?;
            Ok((StatusCode::OK, Json(status)))
        }
        None => Ok((StatusCode::ACCEPTED, Json(queued))),
    }
}

async fn job_status(
    State(state): State<AppState>,
    Path(job_id): Path<String>,
) -> Result<Json<JobStatus>, ApiError> {
    state
        .0
        .queue
        .get(&job_id)
        .map(Json)
        .ok_or_else(|| ApiError::NotFound(format!("no job {job_id}")))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct VersionEntry {
    pub version_sha: CommitSha,
    pub version_num: i64,
    pub config_fingerprints: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ProjectEntry {
    pub name: String,
    pub versions: Vec<VersionEntry>,
}

async fn list_projects(State(state): State<AppState>) -> Result<Json<Vec<ProjectEntry>>, ApiError> {
    let store = Arc::clone(&state.0.stores);
    let summaries = tokio::task::spawn_blocking(move || store[0].list())
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    let mut grouped: BTreeMap<String, BTreeMap<CommitSha, VersionEntry>> = BTreeMap::new();
    for s in summaries {
        let entry = grouped
            .entry(s.name)
            .or_default()
            .entry(s.version_sha.clone())
            .or_insert_with(|| VersionEntry {
                version_sha: s.version_sha,
                version_num: s.version_num,
                config_fingerprints: vec![],
            });
        entry.config_fingerprints.push(s.config_fingerprint);
    }
    Ok(Json(
        grouped
            .into_iter()
            .map(|(name, versions)| ProjectEntry {
                name,
                versions: versions.into_values().collect(),
            })
            .collect(),
    ))
}

#[derive(Debug, Default, Deserialize)]
struct ViewParams {
    top: Option<usize>,
    /// Config fingerprint; the service default when absent.
    config: Option<String>,
}

impl ViewParams {
    fn top(&self) -> Result<usize, ApiError> {
        match self.top {
            Some(0) => Err(ApiError::Invalid("top must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(DEFAULT_TOP),
        }
    }
}

/// Reads the result for `name@sha` under the requested fingerprint, or the
/// default one; if neither is given and the default is absent, any stored
/// variant.
async fn load_result(
    state: &AppState,
    name: String,
    sha: String,
    config: Option<String>,
) -> Result<AnalysisResult, ApiError> {
    let sha: CommitSha = sha
        .parse()
        .map_err(|_| ApiError::NotFound(format!("no result for {name}@{sha}")))?;
    let explicit = config.is_some();
    let key = ResultKey {
        name,
        sha,
        config_fingerprint: config.unwrap_or_else(|| state.0.default_fingerprint.clone()),
    };
    let store = Arc::clone(&state.0.stores);
    tokio::task::spawn_blocking(move || match store[0].read(&key) {
        Err(PersistError::NotFound(_)) if !explicit => {
            let variant = store[0]
                .variants(&key.name, &key.sha)?
                .into_iter()
                .next()
                .ok_or(PersistError::NotFound(key))?;
            store[0].read(&variant.key())
        }
        other => other,
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
    .map_err(ApiError::from)
}

async fn project_view(
    State(state): State<AppState>,
    Path((name, sha)): Path<(String, String)>,
    Query(params): Query<ViewParams>,
) -> Result<Json<ProjectAnnotation>, ApiError> {
    let top = params.top()?;
    let mut project = load_result(&state, name, sha, params.config)
        .await?
        .project_annotation;
    project.top_labels.truncate(top);
    Ok(Json(project))
}

async fn packages_view(
    State(state): State<AppState>,
    Path((name, sha)): Path<(String, String)>,
    Query(params): Query<ViewParams>,
) -> Result<Json<Vec<PackageAnnotation>>, ApiError> {
    let top = params.top()?;
    let mut packages = load_result(&state, name, sha, params.config).await?.packages;
    for p in &mut packages {
        p.top_labels.truncate(top);
    }
    Ok(Json(packages))
}

/// Per-file payload for the package drill-down.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct FileSummary {
    pub path: String,
    pub package: String,
    pub size_bytes: u64,
    pub status: Status,
    pub top_labels: Vec<RankedLabel>,
    pub jsd: Option<f64>,
    pub fallback: bool,
    pub filtered: bool,
}

async fn files_view(
    State(state): State<AppState>,
    Path((name, sha, pkg)): Path<(String, String, String)>,
    Query(params): Query<ViewParams>,
) -> Result<Json<Vec<FileSummary>>, ApiError> {
    let top = params.top()?;
    let result = load_result(&state, name, sha, params.config).await?;
    let package = if pkg == ROOT_PACKAGE_DISPLAY { String::new() } else { pkg };
    if !result.packages.iter().any(|p| p.package == package) {
        return Err(ApiError::NotFound(format!("no package {package}")));
    }
    Ok(Json(
        result
            .files
            .into_iter()
            .filter(|f| f.file.package == package)
            .map(|f| {
                let filtered = f.was_filtered();
                let mut top_labels = f.top_labels;
                top_labels.truncate(top);
                FileSummary {
                    path: f.file.path,
                    package: f.file.package,
                    size_bytes: f.file.size_bytes,
                    status: f.ensemble.status,
                    top_labels,
                    jsd: f.jsd,
                    fallback: f.fallback,
                    filtered,
                }
            })
            .collect(),
    ))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TaxonomyEntry {
    pub id: LabelId,
    pub name: String,
}

async fn taxonomy_view(State(state): State<AppState>) -> Json<Vec<TaxonomyEntry>> {
    Json(
        state
            .0
            .taxonomy
            .labels()
            .iter()
            .map(|l| TaxonomyEntry {
                id: l.id,
                name: l.name.clone(),
            })
            .collect(),
    )
}
