//! Command-line front end. Exit codes: 0 success, 1 configuration error,
//! 2 ingestion error, 3 persistence error, 4 batch finished with failures.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use repolabel_core::config::RunConfig;
use repolabel_core::evaluate::{evaluate_corpus, GroundTruth, Scope};
use repolabel_core::ingest::{parse_batch, CommitSha, ProjectDescriptor};
use repolabel_core::persist::{AnalysisResult, ResultStore};
use repolabel_core::pipeline::{persist, Analyzer, PipelineError};
use repolabel_core::Language;

use crate::api::{router, AppState, ServiceSettings};

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INGEST: i32 = 2;
pub const EXIT_PERSIST: i32 = 3;
pub const EXIT_BATCH_FAILURES: i32 = 4;

const TOP_PRINTED: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "repolabel", version, about = "Label source repositories with application-domain topics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ConfigArgs {
    /// Base YAML config.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Checkout directory.
    #[arg(long, env = "AUTOFL_WORKDIR", default_value = "work")]
    pub workdir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one project version and persist the result.
    Analyze {
        name: String,
        remote_url: String,
        language: Language,
        /// Commit to analyze; the remote HEAD when omitted.
        #[arg(long)]
        sha: Option<CommitSha>,
        #[command(flatten)]
        config: ConfigArgs,
        /// Config overrides, `key=value`.
        overrides: Vec<String>,
    },
    /// Analyze every row of a CSV file (`name,remote_url,language[,sha]`).
    Batch {
        csv: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        overrides: Vec<String>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "AUTOFL_PORT", default_value_t = 8000)]
        port: u16,
        #[command(flatten)]
        config: ConfigArgs,
        overrides: Vec<String>,
    },
    /// Score stored results against ground-truth labels.
    Evaluate {
        /// CSV `name,label[;label...]`.
        #[arg(long)]
        ground_truth: PathBuf,
        /// CSV `name,package,label[;label...]`.
        #[arg(long)]
        package_truth: Option<PathBuf>,
        /// CSV `name,path,label[;label...]`.
        #[arg(long)]
        file_truth: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1,3,10")]
        k: Vec<usize>,
        /// Directory for `metrics.csv` and `metrics.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
        overrides: Vec<String>,
    },
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> i32 {
    let outcome = match cli.command {
        Command::Analyze {
            name,
            remote_url,
            language,
            sha,
            config,
            overrides,
        } => analyze(
            ProjectDescriptor {
                name,
                remote_url,
                language,
                versions: vec![],
            },
            sha,
            &config,
            &overrides,
            out,
        ),
        Command::Batch {
            csv,
            config,
            overrides,
        } => batch(&csv, &config, &overrides, out),
        Command::Serve {
            port,
            config,
            overrides,
        } => serve(port, config, overrides),
        Command::Evaluate {
            ground_truth,
            package_truth,
            file_truth,
            k,
            out: out_dir,
            config,
            overrides,
        } => evaluate(
            &ground_truth,
            package_truth.as_deref(),
            file_truth.as_deref(),
            &k,
            out_dir.as_deref(),
            &config,
            &overrides,
            out,
        ),
    };
    match outcome {
        Ok(code) => code,
        Err((code, message)) => {
            eprintln!("error: {message}");
            code
        }
    }
}

type Outcome = Result<i32, (i32, String)>;

fn fail(e: PipelineError) -> (i32, String) {
    (e.exit_code(), e.to_string())
}

fn load(config: &ConfigArgs, overrides: &[String]) -> Result<Analyzer, (i32, String)> {
    let cfg = RunConfig::load(config.config.as_deref(), overrides)
        .map_err(|e| fail(PipelineError::Config(e)))?;
    Analyzer::new(cfg).map_err(fail)
}

fn open_stores(analyzer: &Analyzer) -> Result<Vec<Box<dyn ResultStore>>, (i32, String)> {
    analyzer
        .open_stores()
        .map_err(|e| fail(PipelineError::Persist(e)))
}

fn run_one(
    analyzer: &Analyzer,
    stores: &[Box<dyn ResultStore>],
    project: &ProjectDescriptor,
    sha: Option<&CommitSha>,
    workdir: &Path,
) -> Result<(AnalysisResult, Vec<String>), PipelineError> {
    let result = analyzer.analyze_remote(project, sha, workdir, None)?;
    let locations = persist(&result, stores)?;
    Ok((result, locations))
}

fn analyze(
    project: ProjectDescriptor,
    sha: Option<CommitSha>,
    config: &ConfigArgs,
    overrides: &[String],
    out: &mut dyn Write,
) -> Outcome {
    let analyzer = load(config, overrides)?;
    let stores = open_stores(&analyzer)?;
    let (result, locations) =
        run_one(&analyzer, &stores, &project, sha.as_ref(), &config.workdir).map_err(fail)?;
    for loc in &locations {
        let _ = writeln!(out, "result: {loc}");
    }
    let _ = writeln!(
        out,
        "{}@{} [{}]: {} files, {} annotated",
        result.project.name,
        result.version.version_sha,
        result.config_fingerprint,
        result.project_annotation.n_files,
        result.project_annotation.n_annotated
    );
    let top = &result.project_annotation.top_labels;
    if top.is_empty() {
        let _ = writeln!(out, "no annotation");
    }
    for (rank, l) in top.iter().take(TOP_PRINTED).enumerate() {
        let name = analyzer.taxonomy().name_of(l.label).unwrap_or("?");
        let _ = writeln!(out, "{:>3}. {name} ({:.6})", rank + 1, l.prob);
    }
    Ok(0)
}

fn batch(csv: &Path, config: &ConfigArgs, overrides: &[String], out: &mut dyn Write) -> Outcome {
    let analyzer = load(config, overrides)?;
    let file = std::fs::File::open(csv)
        .map_err(|e| (EXIT_INGEST, format!("cannot read {}: {e}", csv.display())))?;
    let rows = parse_batch(file).map_err(|e| (EXIT_INGEST, e.to_string()))?;
    if rows.is_empty() {
        tracing::warn!(path = %csv.display(), "batch file has no rows");
        let _ = writeln!(out, "warning: {} has no rows", csv.display());
        return Ok(0);
    }
    let stores = open_stores(&analyzer)?;
    let mut failures = Vec::new();
    let total = rows.len();
    for row in rows {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                tracing::warn!(error = %e, "invalid batch row");
                failures.push(e.to_string());
                continue;
            }
        };
        let project = ProjectDescriptor {
            name: row.name.clone(),
            remote_url: row.remote_url.clone(),
            language: row.language,
            versions: vec![],
        };
        match run_one(&analyzer, &stores, &project, row.sha.as_ref(), &config.workdir) {
            Ok((result, locations)) => {
                let _ = writeln!(
                    out,
                    "ok {}@{}: {}",
                    result.project.name,
                    result.version.version_sha,
                    locations.join(", ")
                );
            }
            Err(e) => {
                tracing::warn!(project = %row.name, error = %e, "batch row failed");
                failures.push(format!("line {} ({}): {e}", row.line, row.name));
            }
        }
    }
    let _ = writeln!(
        out,
        "{total} rows: {} succeeded, {} failed",
        total - failures.len(),
        failures.len()
    );
    for f in &failures {
        let _ = writeln!(out, "  failed: {f}");
    }
    Ok(if failures.is_empty() { 0 } else { EXIT_BATCH_FAILURES })
}

fn serve(port: u16, config: ConfigArgs, overrides: Vec<String>) -> Outcome {
    let settings = ServiceSettings {
        config_path: config.config,
        overrides,
        workdir: config.workdir,
    };
    let state = AppState::from_settings(settings).map_err(fail)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    runtime.block_on(async move {
        let addr = std::net::SocketAddr::from(([0, 0, 0, 0], port));
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| (EXIT_CONFIG, format!("cannot bind {addr}: {e}")))?;
        tracing::info!(%addr, "listening");
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| (EXIT_CONFIG, e.to_string()))?;
        Ok(0)
    })
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    ground_truth: &Path,
    package_truth: Option<&Path>,
    file_truth: Option<&Path>,
    ks: &[usize],
    out_dir: Option<&Path>,
    config: &ConfigArgs,
    overrides: &[String],
    out: &mut dyn Write,
) -> Outcome {
    let analyzer = load(config, overrides)?;
    let open = |p: &Path| {
        std::fs::File::open(p).map_err(|e| (EXIT_CONFIG, format!("cannot read {}: {e}", p.display())))
    };
    let taxonomy = analyzer.taxonomy();
    let mut gt = GroundTruth::read_projects(open(ground_truth)?, taxonomy)
        .map_err(|e| (EXIT_CONFIG, format!("{}: {e}", ground_truth.display())))?;
    for (path, scope) in [(package_truth, Scope::Package), (file_truth, Scope::File)] {
        if let Some(p) = path {
            gt.read_scoped(open(p)?, taxonomy, scope)
                .map_err(|e| (EXIT_CONFIG, format!("{}: {e}", p.display())))?;
        }
    }
    let stores = open_stores(&analyzer)?;
    let store = stores
        .first()
        .ok_or_else(|| (EXIT_CONFIG, "no result store configured".to_string()))?;
    let persist_err = |e| fail(PipelineError::Persist(e));
    let mut results = Vec::new();
    for summary in store.list().map_err(persist_err)? {
        if summary.config_fingerprint == analyzer.fingerprint() {
            results.push(store.read(&summary.key()).map_err(persist_err)?);
        }
    }
    let report = evaluate_corpus(&results, &gt, ks).map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    if report.is_empty() {
        let _ = writeln!(out, "warning: nothing to evaluate");
    }
    let _ = write!(out, "{}", report.to_csv());
    for name in &report.skipped {
        let _ = writeln!(out, "warning: no ground truth for {name}");
    }
    if let Some(dir) = out_dir {
        let write = |name: &str, text: String| {
            std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(name), text))
                .map_err(|e| (EXIT_PERSIST, format!("cannot write {}: {e}", dir.join(name).display())))
        };
        write("metrics.csv", report.to_csv())?;
        write("metrics.json", report.to_json())?;
    }
    Ok(0)
}
