//! In-process analysis queue: one worker thread consumes job requests in
//! submission order, so at most one checkout runs at a time. File
//! annotation inside a job is still parallel.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::mpsc;
use std::sync::{Arc, RwLock};

use repolabel_core::config::RunConfig;
use repolabel_core::ingest::{CommitSha, ProjectDescriptor};
use repolabel_core::persist::ResultStore;
use repolabel_core::pipeline::{Analyzer, PipelineError, Progress};
use repolabel_core::Language;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobState {
    pub fn is_finished(self) -> bool {
        matches!(self, JobState::Done | JobState::Failed)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobProgress {
    pub done: usize,
    pub total: usize,
}

/// Where a finished job's result lives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRef {
    pub name: String,
    pub version_sha: CommitSha,
    pub config_fingerprint: String,
    /// Reported only by the run that wrote the result.
    #[serde(default)]
    pub locations: Vec<String>,
    /// True when an existing result was returned without re-running.
    #[serde(default)]
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisRequest {
    pub name: String,
    pub remote_url: String,
    pub language: Language,
    #[serde(default)]
    pub sha: Option<CommitSha>,
    /// `key=value` overrides on top of the service's base config.
    #[serde(default)]
    pub config_overrides: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobStatus {
    pub job_id: String,
    pub state: JobState,
    pub progress: JobProgress,
    pub error: Option<String>,
    pub result: Option<ResultRef>,
}

/// Identifies analyses that must not run concurrently.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JobKey {
    pub name: String,
    /// The requested sha, or `HEAD` when none was given.
    pub revision: String,
    pub config_fingerprint: String,
}

struct Job {
    status: JobStatus,
    key: JobKey,
}

struct WorkItem {
    job_id: String,
    request: AnalysisRequest,
    config: RunConfig,
    done: Option<tokio::sync::oneshot::Sender<JobStatus>>,
}

#[derive(Debug, thiserror::Error)]
pub enum SubmitError {
    #[error("an analysis for this project, revision and config is already in flight (job {0})")]
    InFlight(String),
}

/// Shared job table plus the sending half of the work queue.
#[derive(Clone)]
pub struct JobQueue {
    jobs: Arc<RwLock<HashMap<String, Job>>>,
    tx: mpsc::Sender<WorkItem>,
}

impl JobQueue {
    /// Starts the worker thread.
    pub fn start(stores: Arc<Vec<Arc<dyn ResultStore>>>, workdir: PathBuf) -> Self {
        let jobs: Arc<RwLock<HashMap<String, Job>>> = Arc::default();
        let (tx, rx) = mpsc::channel::<WorkItem>();
        let table = Arc::clone(&jobs);
        std::thread::Builder::new()
            .name("analysis-worker".into())
            .spawn(move || {
                for item in rx {
                    let status = run_job(&table, &stores, &workdir, &item);
                    if let Some(done) = item.done {
                        let _ = done.send(status);
                    }
                }
            })
            .expect("worker thread starts");
        JobQueue { jobs, tx }
    }

    pub fn get(&self, job_id: &str) -> Option<JobStatus> {
        self.jobs.read().unwrap().get(job_id).map(|j| j.status.clone())
    }

    /// Registers a job that is already complete (a cached result).
    pub fn record_cached(&self, key: JobKey, result: ResultRef) -> JobStatus {
        let status = JobStatus {
            job_id: uuid::Uuid::new_v4().to_string(),
            state: JobState::Done,
            progress: JobProgress::default(),
            error: None,
            result: Some(result),
        };
        self.jobs.write().unwrap().insert(
            status.job_id.clone(),
            Job {
                status: status.clone(),
                key,
            },
        );
        status
    }

    /// Queues a job unless one with the same key is queued or running.
    /// With `notify`, the final status is also sent there.
    pub fn submit(
        &self,
        key: JobKey,
        request: AnalysisRequest,
        config: RunConfig,
        notify: Option<tokio::sync::oneshot::Sender<JobStatus>>,
    ) -> Result<JobStatus, SubmitError> {
        let mut jobs = self.jobs.write().unwrap();
        if let Some((id, _)) = jobs
            .iter()
            .find(|(_, j)| j.key == key && !j.status.state.is_finished())
        {
            return Err(SubmitError::InFlight(id.clone()));
        }
        let status = JobStatus {
            job_id: uuid::Uuid::new_v4().to_string(),
            state: JobState::Queued,
            progress: JobProgress::default(),
            error: None,
            result: None,
        };
        jobs.insert(
            status.job_id.clone(),
            Job {
                status: status.clone(),
                key,
            },
        );
        drop(jobs);
        self.tx
            .send(WorkItem {
                job_id: status.job_id.clone(),
                request,
                config,
                done: notify,
            })
            .expect("worker thread is alive");
        Ok(status)
    }
}

fn update(table: &RwLock<HashMap<String, Job>>, job_id: &str, f: impl FnOnce(&mut JobStatus)) {
    if let Some(job) = table.write().unwrap().get_mut(job_id) {
        f(&mut job.status);
    }
}

fn run_job(
    table: &RwLock<HashMap<String, Job>>,
    stores: &[Arc<dyn ResultStore>],
    workdir: &std::path::Path,
    item: &WorkItem,
) -> JobStatus {
    let id = item.job_id.as_str();
    update(table, id, |s| s.state = JobState::Running);
    let outcome = analyze(table, stores, workdir, item);
    update(table, id, |s| match outcome {
        Ok(result) => {
            s.state = JobState::Done;
            s.result = Some(result);
        }
        Err(e) => {
            tracing::warn!(job = id, error = %e, "analysis failed");
            s.state = JobState::Failed;
            s.error = Some(e.to_string());
        }
    });
    table.read().unwrap()[id].status.clone()
}

fn analyze(
    table: &RwLock<HashMap<String, Job>>,
    stores: &[Arc<dyn ResultStore>],
    workdir: &std::path::Path,
    item: &WorkItem,
) -> Result<ResultRef, PipelineError> {
    let analyzer = Analyzer::new(item.config.clone())?;
    let project = ProjectDescriptor {
        name: item.request.name.clone(),
        remote_url: item.request.remote_url.clone(),
        language: item.request.language,
        versions: vec![],
    };
    let progress = |p: Progress| {
        // reports from parallel workers can arrive out of order
        update(table, &item.job_id, |s| {
            s.progress.total = p.total;
            s.progress.done = s.progress.done.max(p.done);
        })
    };
    let result = analyzer.analyze_remote(&project, item.request.sha.as_ref(), workdir, Some(&progress))?;
    let locations = stores
        .iter()
        .map(|s| s.write(&result))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResultRef {
        name: result.project.name.clone(),
        version_sha: result.version.version_sha.clone(),
        config_fingerprint: result.config_fingerprint.clone(),
        locations,
        cached: false,
    })
}
