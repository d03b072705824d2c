use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{AnalysisResult, PersistError, ResultKey, ResultStore, ResultSummary};

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> PersistError + '_ {
    move |source| PersistError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the canonical JSON form of `result`. The file is replaced
/// atomically.
pub fn write_json(result: &AnalysisResult, path: &Path) -> Result<(), PersistError> {
    let text = result.to_canonical_json();
    let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
    std::fs::write(&tmp, text).map_err(io(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io(path))
}

pub fn read_json(path: &Path) -> Result<AnalysisResult, PersistError> {
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|e| PersistError::Decode {
        location: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Directory of canonical JSON results.
#[derive(Debug)]
pub struct JsonStore {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl JsonStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        JsonStore {
            dir: dir.into(),
            write_lock: Mutex::new(()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &ResultKey) -> PathBuf {
        self.dir
            .join(&key.name)
            .join(key.sha.as_str())
            .join(format!("{}.json", key.config_fingerprint))
    }
}

impl ResultStore for JsonStore {
    fn write(&self, result: &AnalysisResult) -> Result<String, PersistError> {
        let path = self.path_for(&result.key());
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let parent = path.parent().expect("result path has a parent");
        std::fs::create_dir_all(parent).map_err(io(parent))?;
        write_json(result, &path)?;
        Ok(path.display().to_string())
    }

    fn read(&self, key: &ResultKey) -> Result<AnalysisResult, PersistError> {
        let path = self.path_for(key);
        if !path.exists() {
            return Err(PersistError::NotFound(key.clone()));
        }
        read_json(&path)
    }

    fn list(&self) -> Result<Vec<ResultSummary>, PersistError> {
        let mut out = Vec::new();
        if !self.dir.exists() {
            return Ok(out);
        }
        for entry in walkdir::WalkDir::new(&self.dir).min_depth(3).max_depth(3) {
            let entry = entry.map_err(|e| PersistError::Io {
                path: self.dir.clone(),
                source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("walk error")),
            })?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let result = read_json(path)?;
            out.push(result.summary());
        }
        out.sort();
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("json:{}", self.dir.display())
    }
}
