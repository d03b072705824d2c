mod common;

use repolabel_core::ingest::{
    checkout, enumerate_files, parse_batch, resolve_head, worktree_path, CommitSha, IgnoreList,
    IngestError, ProjectDescriptor,
};
use repolabel_core::Language;

fn project(remote: &std::path::Path) -> ProjectDescriptor {
    ProjectDescriptor {
        name: "widgets".into(),
        remote_url: format!("file://{}", remote.display()),
        language: Language::Java,
        versions: vec![],
    }
}

fn two_commit_repo(dir: &std::path::Path) -> (std::path::PathBuf, String, String) {
    let repo = dir.join("origin");
    let first = common::init_repo(&repo, &common::fixtures().join("widgets-repo"));
    std::fs::write(repo.join("Extra.java"), "class Extra { int pixel; }\n").unwrap();
    common::git(&repo, &["add", "-A"]);
    common::git(&repo, &["commit", "--quiet", "-m", "second"]);
    let second = common::git(&repo, &["rev-parse", "HEAD"]);
    (repo, first, second)
}

#[test]
fn checkout_matches_the_requested_commit() {
    let dir = tempfile::tempdir().unwrap();
    let (repo, first, second) = two_commit_repo(dir.path());
    let p = project(&repo);
    let work = dir.path().join("work");

    let sha1: CommitSha = first.parse().unwrap();
    let tree = checkout(&p, &sha1, &work).unwrap();
    assert_eq!(tree.root, worktree_path(&work, "widgets", &sha1));
    assert_eq!(tree.version.version_num, 0);
    assert!(!tree.root.join("Extra.java").exists());
    assert_eq!(common::git(&tree.root, &["rev-parse", "HEAD"]), first);

    let sha2: CommitSha = second.parse().unwrap();
    let tree2 = checkout(&p, &sha2, &work).unwrap();
    assert_eq!(tree2.version.version_num, 1);
    assert!(tree2.root.join("Extra.java").exists());

    let files = enumerate_files(&tree.root, Language::Java, &IgnoreList::default()).unwrap();
    assert_eq!(files.len(), 30);

    assert_eq!(resolve_head(&p.remote_url).unwrap(), sha2);
}

#[test]
fn repeated_checkout_reuses_the_tree() {
    let dir = tempfile::tempdir().unwrap();
    let (repo, first, _) = two_commit_repo(dir.path());
    let p = project(&repo);
    let work = dir.path().join("work");
    let sha: CommitSha = first.parse().unwrap();
    let a = checkout(&p, &sha, &work).unwrap();
    let marker = a.root.join(".git").join("repolabel-marker");
    std::fs::write(&marker, "x").unwrap();
    let b = checkout(&p, &sha, &work).unwrap();
    assert_eq!(a, b);
    assert!(marker.exists(), "existing checkout was re-cloned");
    let leftovers: Vec<_> = std::fs::read_dir(work.join("widgets"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .filter(|n| n.starts_with(".partial"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn unknown_revision_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (repo, _, _) = two_commit_repo(dir.path());
    let sha: CommitSha = "deadbeefdeadbeefdeadbeefdeadbeefdeadbeef".parse().unwrap();
    let err = checkout(&project(&repo), &sha, &dir.path().join("work")).unwrap_err();
    assert!(matches!(err, IngestError::UnknownRevision { .. }), "{err}");
    assert!(!worktree_path(&dir.path().join("work"), "widgets", &sha).exists());
}

#[test]
fn unreachable_remote_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = project(&dir.path().join("missing"));
    let sha: CommitSha = "deadbeefdeadbeefdeadbeefdeadbeefdeadbeef".parse().unwrap();
    assert!(matches!(
        checkout(&p, &sha, &dir.path().join("work")),
        Err(IngestError::Unreachable { .. })
    ));
    assert!(matches!(resolve_head(&p.remote_url), Err(IngestError::Unreachable { .. })));
}

#[test]
fn dirty_worktree_is_not_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let (repo, first, _) = two_commit_repo(dir.path());
    let p = project(&repo);
    let work = dir.path().join("work");
    let sha: CommitSha = first.parse().unwrap();
    let tree = checkout(&p, &sha, &work).unwrap();
    std::fs::write(tree.root.join("README.md"), "local edit\n").unwrap();
    assert!(matches!(checkout(&p, &sha, &work), Err(IngestError::DirtyWorktree(_))));
    assert_eq!(std::fs::read_to_string(tree.root.join("README.md")).unwrap(), "local edit\n");
}

#[test]
fn invalid_project_names_are_rejected_before_touching_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = project(dir.path());
    p.name = "../escape".into();
    let sha: CommitSha = "deadbeefdeadbeefdeadbeefdeadbeefdeadbeef".parse().unwrap();
    assert!(matches!(checkout(&p, &sha, dir.path()), Err(IngestError::InvalidName(_))));
}

#[test]
fn batch_rows() {
    let csv = "name,remote_url,language,sha\n\
               a,https://example.com/a.git,java,\n\
               # skipped\n\
               b,https://example.com/b.git,cobol,\n\
               c,https://example.com/c.git,python,0123456789abcdef0123456789abcdef01234567\n";
    let rows = parse_batch(csv.as_bytes()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].as_ref().unwrap().sha.is_none());
    assert!(rows[1].is_err());
    assert_eq!(rows[2].as_ref().unwrap().language, Language::Python);
}
