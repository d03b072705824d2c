//! Materializing a project version on disk and listing its source files.
//!
//! Working trees live at `<workdir>/<name>/<sha>/`. A checkout is exclusive
//! per worktree path; once a tree exists at the requested commit and is
//! clean, re-running [`checkout`] is a no-op that touches no remote.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::str::FromStr;
use std::sync::{Arc, LazyLock, Mutex};

use serde::{Deserialize, Serialize};

use crate::language::Language;

/// 40-character lowercase hex commit id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CommitSha(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid commit sha `{0}` (expected 40 hex characters)")]
pub struct InvalidSha(pub String);

impl CommitSha {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for CommitSha {
    type Err = InvalidSha;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.len() == 40 && s.bytes().all(|b| b.is_ascii_hexdigit()) {
            Ok(CommitSha(s.to_ascii_lowercase()))
        } else {
            Err(InvalidSha(s.to_string()))
        }
    }
}

impl TryFrom<String> for CommitSha {
    type Error = InvalidSha;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CommitSha> for String {
    fn from(s: CommitSha) -> Self {
        s.0
    }
}

impl fmt::Display for CommitSha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionRef {
    pub version_sha: CommitSha,
    /// 0-based position in the commit history, or -1 when history depth is unknown.
    pub version_num: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectDescriptor {
    pub name: String,
    pub remote_url: String,
    pub language: Language,
    #[serde(default)]
    pub versions: Vec<VersionRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid project name `{0}` (use letters, digits, `.`, `_`, `-`; no leading dot)")]
pub struct InvalidProjectName(pub String);

/// Project names double as directory names, so they are restricted to a safe
/// character set.
pub fn validate_project_name(name: &str) -> Result<(), InvalidProjectName> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    if ok {
        Ok(())
    } else {
        Err(InvalidProjectName(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceFileRef {
    /// Repository-relative path with `/` separators.
    pub path: String,
    pub package: String,
    pub size_bytes: u64,
}

/// Display form of the root package id.
pub const ROOT_PACKAGE_DISPLAY: &str = "<root>";

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("remote `{remote}` is unreachable: {detail}")]
    Unreachable { remote: String, detail: String },
    #[error("unknown revision {sha} in `{remote}`")]
    UnknownRevision { remote: String, sha: CommitSha },
    #[error("working tree {0} has local modifications; refusing to overwrite")]
    DirtyWorktree(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("git failed: {0}")]
    Git(String),
    #[error(transparent)]
    InvalidName(#[from] InvalidProjectName),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

struct GitOutput {
    ok: bool,
    stdout: String,
    stderr: String,
}

fn git(dir: Option<&Path>, args: &[&str]) -> Result<GitOutput, IngestError> {
    let mut cmd = Command::new("git");
    if let Some(dir) = dir {
        cmd.current_dir(dir);
    }
    let out = cmd
        .args(args)
        .env("GIT_TERMINAL_PROMPT", "0")
        .env("GIT_ASKPASS", "true")
        .output()
        .map_err(|e| IngestError::Git(format!("cannot run git: {e}")))?;
    Ok(GitOutput {
        ok: out.status.success(),
        stdout: String::from_utf8_lossy(&out.stdout).trim().to_string(),
        stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
    })
}

/// Resolves the remote's default-branch head commit.
pub fn resolve_head(remote_url: &str) -> Result<CommitSha, IngestError> {
    let out = git(None, &["ls-remote", remote_url, "HEAD"])?;
    if !out.ok {
        return Err(IngestError::Unreachable {
            remote: remote_url.to_string(),
            detail: out.stderr,
        });
    }
    out.stdout
        .split_whitespace()
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| IngestError::Unreachable {
            remote: remote_url.to_string(),
            detail: "remote has no HEAD".into(),
        })
}

static WORKTREE_LOCKS: LazyLock<Mutex<HashMap<PathBuf, Arc<Mutex<()>>>>> =
    LazyLock::new(Default::default);

fn worktree_lock(path: &Path) -> Arc<Mutex<()>> {
    WORKTREE_LOCKS
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry(path.to_path_buf())
        .or_default()
        .clone()
}

/// A checked-out working tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Worktree {
    pub root: PathBuf,
    pub version: VersionRef,
}

pub fn worktree_path(workdir: &Path, name: &str, sha: &CommitSha) -> PathBuf {
    workdir.join(name).join(sha.as_str())
}

/// Checks out `sha` of the project's remote into `<workdir>/<name>/<sha>/`.
pub fn checkout(
    project: &ProjectDescriptor,
    sha: &CommitSha,
    workdir: &Path,
) -> Result<Worktree, IngestError> {
    validate_project_name(&project.name)?;
    let target = worktree_path(workdir, &project.name, sha);
    let lock = worktree_lock(&target);
    let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());

    if target.join(".git").exists() {
        let status = git(Some(&target), &["status", "--porcelain"])?;
        if !status.ok {
            return Err(IngestError::Git(status.stderr));
        }
        if !status.stdout.is_empty() {
            return Err(IngestError::DirtyWorktree(target));
        }
        let head = git(Some(&target), &["rev-parse", "HEAD"])?;
        if head.ok && head.stdout == sha.as_str() {
            return Ok(Worktree {
                version: VersionRef {
                    version_sha: sha.clone(),
                    version_num: version_num(&target, sha),
                },
                root: target,
            });
        }
        detach_at(&target, &project.remote_url, sha)?;
        return Ok(Worktree {
            version: VersionRef {
                version_sha: sha.clone(),
                version_num: version_num(&target, sha),
            },
            root: target,
        });
    }

    let parent = target.parent().expect("worktree has a parent");
    std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    let staging = parent.join(format!(".partial-{}-{}", sha, std::process::id()));
    if staging.exists() {
        std::fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    let staging_str = staging.to_string_lossy().to_string();
    let clone = git(
        None,
        &["clone", "--quiet", "--no-checkout", &project.remote_url, &staging_str],
    )?;
    if !clone.ok {
        let _ = std::fs::remove_dir_all(&staging);
        return Err(IngestError::Unreachable {
            remote: project.remote_url.clone(),
            detail: clone.stderr,
        });
    }
    if let Err(e) = detach_at(&staging, &project.remote_url, sha) {
        let _ = std::fs::remove_dir_all(&staging);
        return Err(e);
    }
    std::fs::rename(&staging, &target).map_err(io_err(&target))?;
    Ok(Worktree {
        version: VersionRef {
            version_sha: sha.clone(),
            version_num: version_num(&target, sha),
        },
        root: target,
    })
}

fn detach_at(repo: &Path, remote: &str, sha: &CommitSha) -> Result<(), IngestError> {
    let spec = format!("{}^{{commit}}", sha);
    if !git(Some(repo), &["cat-file", "-e", &spec])?.ok {
        // the commit may not be reachable from the advertised refs
        let _ = git(Some(repo), &["fetch", "--quiet", "origin", sha.as_str()])?;
        if !git(Some(repo), &["cat-file", "-e", &spec])?.ok {
            return Err(IngestError::UnknownRevision {
                remote: remote.to_string(),
                sha: sha.clone(),
            });
        }
    }
    let co = git(Some(repo), &["checkout", "--quiet", "--detach", sha.as_str()])?;
    if co.ok {
        Ok(())
    } else {
        Err(IngestError::Git(co.stderr))
    }
}

fn version_num(repo: &Path, sha: &CommitSha) -> i64 {
    git(Some(repo), &["rev-list", "--count", sha.as_str()])
        .ok()
        .filter(|o| o.ok)
        .and_then(|o| o.stdout.parse::<i64>().ok())
        .map(|n| n - 1)
        .unwrap_or(-1)
}

/// Directory-segment ignore rules. An entry matches a segment exactly; the
/// special entry `.*` matches every hidden directory. VCS metadata
/// directories are always skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IgnoreList(pub Vec<String>);

impl Default for IgnoreList {
    fn default() -> Self {
        IgnoreList(vec!["test".into(), "tests".into(), ".*".into()])
    }
}

const VCS_DIRS: [&str; 4] = [".git", ".hg", ".svn", ".bzr"];

impl IgnoreList {
    pub fn matches_dir(&self, segment: &str) -> bool {
        VCS_DIRS.contains(&segment)
            || self
                .0
                .iter()
                .any(|rule| rule == segment || (rule == ".*" && segment.starts_with('.')))
    }
}

/// Lists source files of `language` under `root` in lexicographic path order.
/// The `package` field is directory-derived; declared packages are applied
/// later by [`derive_package`].
pub fn enumerate_files(
    root: &Path,
    language: Language,
    ignore: &IgnoreList,
) -> Result<Vec<SourceFileRef>, IngestError> {
    let meta = std::fs::metadata(root).map_err(io_err(root))?;
    if !meta.is_dir() {
        return Err(IngestError::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        });
    }
    let walker = walkdir::WalkDir::new(root)
        .follow_links(false)
        .into_iter()
        .filter_entry(|e| {
            e.depth() == 0
                || !e.file_type().is_dir()
                || !ignore.matches_dir(&e.file_name().to_string_lossy())
        });
    let mut files = Vec::new();
    for entry in walker {
        let entry = entry.map_err(|e| IngestError::Io {
            path: e.path().unwrap_or(root).to_path_buf(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("walk error")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let ext = entry.path().extension().and_then(|e| e.to_str()).unwrap_or("");
        if !language.matches_extension(ext) {
            continue;
        }
        let rel = entry.path().strip_prefix(root).expect("walk stays under root");
        let path = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let size_bytes = entry.metadata().map(|m| m.len()).unwrap_or(0);
        files.push(SourceFileRef {
            package: derive_package(&path, language, None),
            path,
            size_bytes,
        });
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(files)
}

/// Package id for a file: the declared package for Java/C# when one was
/// found, otherwise the parent directory (dotted for Java/C#/Python, `/` for
/// C/C++). Root-level files belong to package `""`.
pub fn derive_package(path: &str, language: Language, declared: Option<&str>) -> String {
    if language.declares_packages() {
        if let Some(decl) = declared.map(str::trim).filter(|d| !d.is_empty()) {
            return decl.to_string();
        }
    }
    let parent = match path.rfind('/') {
        Some(i) => &path[..i],
        None => return String::new(),
    };
    match language {
        Language::C | Language::Cpp => parent.to_string(),
        Language::Java | Language::Csharp | Language::Python => parent.replace('/', "."),
    }
}

pub fn display_package(package: &str) -> &str {
    if package.is_empty() {
        ROOT_PACKAGE_DISPLAY
    } else {
        package
    }
}

/// One row of a batch input file: `name,remote_url,language[,sha]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchRow {
    pub line: usize,
    pub name: String,
    pub remote_url: String,
    pub language: Language,
    pub sha: Option<CommitSha>,
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error("cannot read batch file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

/// Parses a batch CSV. A leading `name,...` header row is skipped; blank
/// lines and `#` comments are ignored. Rows that fail validation are
/// returned as errors alongside the valid ones so a batch can continue.
pub fn parse_batch(reader: impl Read) -> Result<Vec<Result<BatchRow, BatchError>>, BatchError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| BatchError::Io(std::io::Error::other(e)))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && record.get(0) == Some("name") {
            continue;
        }
        rows.push(parse_batch_record(&record, line));
    }
    Ok(rows)
}

fn parse_batch_record(record: &csv::StringRecord, line: usize) -> Result<BatchRow, BatchError> {
    let row_err = |message: String| BatchError::Row { line, message };
    if record.len() < 3 || record.len() > 4 {
        return Err(row_err(format!("expected 3 or 4 fields, found {}", record.len())));
    }
    let name = record[0].to_string();
    validate_project_name(&name).map_err(|e| row_err(e.to_string()))?;
    let language = record[2].parse().map_err(|e: crate::language::UnknownLanguage| row_err(e.to_string()))?;
    let sha = match record.get(3).filter(|s| !s.is_empty()) {
        Some(s) => Some(s.parse().map_err(|e: InvalidSha| row_err(e.to_string()))?),
        None => None,
    };
    Ok(BatchRow {
        line,
        name,
        remote_url: record[1].to_string(),
        language,
        sha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn touch(root: &Path, rel: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, "x").unwrap();
    }

    fn paths(files: &[SourceFileRef]) -> Vec<&str> {
        files.iter().map(|f| f.path.as_str()).collect()
    }

    #[test]
    fn filters_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "src/A.java");
        touch(dir.path(), "README.md");
        let files = enumerate_files(dir.path(), Language::Java, &IgnoreList::default()).unwrap();
        assert_eq!(paths(&files), ["src/A.java"]);
        assert_eq!(files[0].size_bytes, 1);
    }

    #[test]
    fn empty_directory_yields_nothing() {
        let dir = tempfile::tempdir().unwrap();
        assert!(enumerate_files(dir.path(), Language::Python, &IgnoreList::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn lexicographic_order_and_ignores() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "a/b/C.java");
        touch(dir.path(), "a/B.java");
        touch(dir.path(), "test/T.java");
        touch(dir.path(), "x/tests/U.java");
        touch(dir.path(), ".hidden/H.java");
        touch(dir.path(), ".git/G.java");
        let files = enumerate_files(dir.path(), Language::Java, &IgnoreList::default()).unwrap();
        assert_eq!(paths(&files), ["a/B.java", "a/b/C.java"]);

        let keep_tests = IgnoreList(vec![]);
        let files = enumerate_files(dir.path(), Language::Java, &keep_tests).unwrap();
        assert_eq!(
            paths(&files),
            [".hidden/H.java", "a/B.java", "a/b/C.java", "test/T.java", "x/tests/U.java"]
        );
    }

    #[test]
    fn missing_root_is_an_error() {
        let err = enumerate_files(Path::new("/definitely/not/here"), Language::C, &IgnoreList::default());
        assert!(matches!(err, Err(IngestError::Io { .. })));
    }

    #[test]
    fn package_derivation() {
        assert_eq!(
            derive_package("src/main/java/com/x/ui/Button.java", Language::Java, Some("com.x.ui")),
            "com.x.ui"
        );
        assert_eq!(derive_package("src/main/Button.java", Language::Java, None), "src.main");
        assert_eq!(derive_package("pkg/img/filters.py", Language::Python, None), "pkg.img");
        assert_eq!(derive_package("Main.java", Language::Java, None), "");
        assert_eq!(derive_package("lib/gfx/draw.c", Language::C, None), "lib/gfx");
        assert_eq!(derive_package("a/b.py", Language::Python, Some("ignored")), "a");
        assert_eq!(display_package(""), "<root>");
    }

    #[test]
    fn sha_parsing() {
        let sha: CommitSha = "ABCDEF0123456789abcdef0123456789ABCDEF01".parse().unwrap();
        assert_eq!(sha.as_str(), "abcdef0123456789abcdef0123456789abcdef01");
        assert!("deadbeef".parse::<CommitSha>().is_err());
    }

    #[test]
    fn batch_csv() {
        let text = "name,remote_url,language,sha\n\
                    alpha,https://example.org/a.git,java\n\
                    # comment\n\
                    beta,/tmp/b,python,0123456789abcdef0123456789abcdef01234567\n\
                    ../evil,/tmp/c,java\n\
                    gamma,/tmp/g,cobol\n";
        let rows = parse_batch(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].as_ref().unwrap().name, "alpha");
        assert!(rows[0].as_ref().unwrap().sha.is_none());
        assert_eq!(rows[1].as_ref().unwrap().language, Language::Python);
        assert!(rows[2].is_err());
        assert!(rows[3].as_ref().unwrap_err().to_string().contains("cobol"));
        assert!(parse_batch("".as_bytes()).unwrap().is_empty());
    }
}
