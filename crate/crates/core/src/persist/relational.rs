use std::sync::Mutex;

use rusqlite::{params, Connection, OptionalExtension};

use super::{canonical, AnalysisResult, PersistError, ResultKey, ResultStore, ResultSummary};
use crate::ingest::VersionRef;

/// DDL for the results table.
pub const MIGRATION: &str = include_str!("../../migrations/0001_projects.sql");

/// JSON column bound of the reference deployment (256 MiB).
pub const DEFAULT_MAX_DOCUMENT_BYTES: usize = 256 * 1024 * 1024;

/// Single-table relational store (SQLite).
pub struct RelationalStore {
    conn: Mutex<Connection>,
    url: String,
    max_document_bytes: usize,
}

impl std::fmt::Debug for RelationalStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RelationalStore").field("url", &self.url).finish()
    }
}

fn parse_url(url: &str) -> Result<Option<&str>, PersistError> {
    let url = url.trim();
    if url == "sqlite::memory:" || url == ":memory:" {
        return Ok(None);
    }
    if let Some(path) = url.strip_prefix("sqlite://").or_else(|| url.strip_prefix("sqlite:")) {
        if path.is_empty() {
            return Err(PersistError::UnsupportedUrl(url.to_string()));
        }
        return Ok(Some(path));
    }
    if url.contains("://") {
        return Err(PersistError::UnsupportedUrl(url.to_string()));
    }
    Ok(Some(url))
}

#[derive(serde::Serialize, serde::Deserialize)]
struct VersionDocument {
    files: serde_json::Value,
    packages: serde_json::Value,
    project_annotation: serde_json::Value,
    config: serde_json::Value,
    timings: serde_json::Value,
    tool_version: String,
}

impl RelationalStore {
    /// Opens `sqlite://<path>`, `sqlite::memory:` or a bare file path and
    /// applies the migration.
    pub fn open(url: &str) -> Result<Self, PersistError> {
        let conn = match parse_url(url)? {
            None => Connection::open_in_memory()?,
            Some(path) => {
                let conn = Connection::open(path)?;
                conn.pragma_update(None, "journal_mode", "WAL")?;
                conn
            }
        };
        conn.busy_timeout(std::time::Duration::from_secs(5))?;
        conn.execute_batch(MIGRATION)?;
        Ok(RelationalStore {
            conn: Mutex::new(conn),
            url: url.to_string(),
            max_document_bytes: DEFAULT_MAX_DOCUMENT_BYTES,
        })
    }

    pub fn in_memory() -> Result<Self, PersistError> {
        Self::open("sqlite::memory:")
    }

    pub fn with_max_document_bytes(mut self, limit: usize) -> Self {
        self.max_document_bytes = limit;
        self
    }

    pub fn row_count(&self) -> Result<usize, PersistError> {
        let conn = self.conn.lock().unwrap_or_else(|e| e.into_inner());
        let n: i64 = conn.query_row("SELECT COUNT(*) FROM projects", [], |r| r.get(0))?;
        Ok(n as usize)
    }

    fn encode(result: &AnalysisResult) -> Result<(String, String), PersistError> {
        let enc = |e: serde_json::Error| PersistError::Decode {
            location: "encode".into(),
            message: e.to_string(),
        };
        let project = canonical::to_canonical_compact(&result.project).map_err(enc)?;
        let doc = VersionDocument {
            files: serde_json::to_value(&result.files).map_err(enc)?,
            packages: serde_json::to_value(&result.packages).map_err(enc)?,
            project_annotation: serde_json::to_value(&result.project_annotation).map_err(enc)?,
            config: result.config.clone(),
            timings: serde_json::to_value(&result.timings).map_err(enc)?,
            tool_version: result.tool_version.clone(),
        };
        let version = canonical::to_canonical_compact(&doc).map_err(enc)?;
        Ok((project, version))
    }
}

impl ResultStore for RelationalStore {
    fn write(&self, result: &AnalysisResult) -> Result<String, PersistError> {
        let (project, version) = Self::encode(result)?;
        let bytes = project.len().max(version.len());
        if bytes > self.max_document_bytes {
            return Err(PersistError::TooLarge {
                bytes,
                limit: self.max_document_bytes,
            });
        }
        let conn = self.conn.lock().unwrap_or_else(|e| e.into_inner());
        conn.execute(
            "INSERT INTO projects (name, version_sha, version_num, config, project, version)
             VALUES (?1, ?2, ?3, ?4, ?5, ?6)
             ON CONFLICT (name, version_sha, config) DO UPDATE SET
                version_num = excluded.version_num,
                project = excluded.project,
                version = excluded.version",
            params![
                result.project.name,
                result.version.version_sha.as_str(),
                result.version.version_num,
                result.config_fingerprint,
                project,
                version
            ],
        )?;
        Ok(format!("{}#{}", self.describe(), result.key()))
    }

    fn read(&self, key: &ResultKey) -> Result<AnalysisResult, PersistError> {
        let conn = self.conn.lock().unwrap_or_else(|e| e.into_inner());
        let row: Option<(i64, String, String)> = conn
            .query_row(
                "SELECT version_num, project, version FROM projects
                 WHERE name = ?1 AND version_sha = ?2 AND config = ?3",
                params![key.name, key.sha.as_str(), key.config_fingerprint],
                |r| Ok((r.get(0)?, r.get(1)?, r.get(2)?)),
            )
            .optional()?;
        let (version_num, project, version) = row.ok_or_else(|| PersistError::NotFound(key.clone()))?;
        let decode = |e: serde_json::Error| PersistError::Decode {
            location: format!("{}#{}", self.describe(), key),
            message: e.to_string(),
        };
        let doc: VersionDocument = serde_json::from_str(&version).map_err(decode)?;
        Ok(AnalysisResult {
            project: serde_json::from_str(&project).map_err(decode)?,
            version: VersionRef {
                version_sha: key.sha.clone(),
                version_num,
            },
            config_fingerprint: key.config_fingerprint.clone(),
            config: doc.config,
            files: serde_json::from_value(doc.files).map_err(decode)?,
            packages: serde_json::from_value(doc.packages).map_err(decode)?,
            project_annotation: serde_json::from_value(doc.project_annotation).map_err(decode)?,
            timings: serde_json::from_value(doc.timings).map_err(decode)?,
            tool_version: doc.tool_version,
        })
    }

    fn list(&self) -> Result<Vec<ResultSummary>, PersistError> {
        let conn = self.conn.lock().unwrap_or_else(|e| e.into_inner());
        let mut stmt = conn.prepare(
            "SELECT name, version_sha, version_num, config FROM projects
             ORDER BY name, version_sha, version_num, config",
        )?;
        let rows = stmt.query_map([], |r| {
            Ok((
                r.get::<_, String>(0)?,
                r.get::<_, String>(1)?,
                r.get::<_, i64>(2)?,
                r.get::<_, String>(3)?,
            ))
        })?;
        let mut out = Vec::new();
        for row in rows {
            let (name, sha, version_num, config_fingerprint) = row?;
            let version_sha = sha.parse().map_err(|e: crate::ingest::InvalidSha| PersistError::Decode {
                location: format!("{}#{}", self.describe(), name),
                message: e.to_string(),
            })?;
            out.push(ResultSummary {
                name,
                version_sha,
                version_num,
                config_fingerprint,
            });
        }
        out.sort();
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("relational:{}", self.url)
    }
}
