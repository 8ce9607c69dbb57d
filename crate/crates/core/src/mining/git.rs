use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Arc;

use chrono::DateTime;

use super::{dedup_paths, is_java, sort_commits, CommitRecord, MiningError, OpenOptions, Repository, Result, Snapshot};

/// Repository read through the `git` command-line tool.
pub struct GitRepository {
    root: PathBuf,
    project_id: String,
    no_merges: bool,
}

impl GitRepository {
    pub fn open(root: &Path, opts: &OpenOptions) -> Result<Self> {
        let repo = Self {
            root: root.to_path_buf(),
            project_id: opts.project_id.clone().unwrap_or_else(|| {
                root.canonicalize()
                    .ok()
                    .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                    .unwrap_or_else(|| root.display().to_string())
            }),
            no_merges: opts.no_merges,
        };
        repo.git(&["rev-parse", "--git-dir"])
            .map_err(|_| MiningError::RepoUnreadable(root.display().to_string()))?;
        Ok(repo)
    }

    fn command(&self) -> Command {
        let mut cmd = Command::new("git");
        cmd.arg("-C").arg(&self.root).args(["-c", "core.quotepath=off"]);
        cmd
    }

    fn git(&self, args: &[&str]) -> Result<Vec<u8>> {
        let out = self
            .command()
            .args(args)
            .stderr(Stdio::piped())
            .output()
            .map_err(|e| MiningError::RepoUnreadable(format!("cannot run git: {e}")))?;
        if !out.status.success() {
            return Err(MiningError::RepoUnreadable(format!(
                "git {}: {}",
                args.join(" "),
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        Ok(out.stdout)
    }

    fn has_commit(&self, rev: &str) -> bool {
        self.git(&["rev-parse", "--verify", "-q", &format!("{rev}^{{commit}}")])
            .is_ok()
    }

    fn read_blobs(&self, ids: &[String]) -> Result<Vec<Vec<u8>>> {
        let mut child = self
            .command()
            .args(["cat-file", "--batch"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = ids.join("\n") + "\n";
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let out = child.wait_with_output()?;
        writer.join().expect("writer thread")?;
        let mut blobs = Vec::with_capacity(ids.len());
        let mut rest = out.stdout.as_slice();
        for id in ids {
            let nl = rest
                .iter()
                .position(|&b| b == b'\n')
                .ok_or_else(|| MiningError::RepoUnreadable(format!("truncated cat-file output at {id}")))?;
            let header = String::from_utf8_lossy(&rest[..nl]).into_owned();
            let size: usize = header
                .rsplit(' ')
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| MiningError::RepoUnreadable(format!("bad cat-file header {header:?}")))?;
            let body = &rest[nl + 1..];
            if body.len() < size {
                return Err(MiningError::RepoUnreadable(format!("short blob {id}")));
            }
            blobs.push(body[..size].to_vec());
            rest = &body[(size + 1).min(body.len())..];
        }
        Ok(blobs)
    }
}

fn parse_log(raw: &str) -> Result<Vec<CommitRecord>> {
    let mut out = Vec::new();
    for record in raw.split('\x1e').filter(|r| !r.trim().is_empty()) {
        let parts: Vec<&str> = record.splitn(5, '\x1f').collect();
        let [id, author, at, message, files] = parts[..] else {
            return Err(MiningError::RepoUnreadable(format!("unexpected git log record {record:?}")));
        };
        let secs: i64 = at
            .trim()
            .parse()
            .map_err(|_| MiningError::RepoUnreadable(format!("bad author time {at:?}")))?;
        let author_time = DateTime::from_timestamp(secs, 0)
            .ok_or_else(|| MiningError::RepoUnreadable(format!("author time out of range: {secs}")))?;
        let mut changed_paths: Vec<String> = files
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        dedup_paths(&mut changed_paths);
        out.push(CommitRecord {
            id: id.trim().to_string(),
            author_name: author.to_string(),
            author_time,
            message: message.trim_end().to_string(),
            changed_paths,
        });
    }
    Ok(out)
}

impl Repository for GitRepository {
    fn project_id(&self) -> &str {
        &self.project_id
    }

    fn enumerate_commits(&self) -> Result<Vec<CommitRecord>> {
        if !self.has_commit("HEAD") {
            return Err(MiningError::EmptyRepository);
        }
        let mut args = vec![
            "log",
            "HEAD",
            "--no-renames",
            "--name-only",
            "--format=%x1e%H%x1f%an%x1f%at%x1f%B%x1f",
        ];
        if self.no_merges {
            args.push("--no-merges");
        }
        let raw = self.git(&args)?;
        let mut commits = parse_log(&String::from_utf8_lossy(&raw))?;
        if commits.is_empty() {
            return Err(MiningError::EmptyRepository);
        }
        sort_commits(&mut commits);
        Ok(commits)
    }

    fn snapshot_files(&self, commit_id: &str) -> Result<Snapshot> {
        if commit_id.starts_with('-') || !self.has_commit(commit_id) {
            return Err(MiningError::UnknownCommit(commit_id.to_string()));
        }
        let tree = self.git(&["ls-tree", "-r", "-z", commit_id])?;
        let mut paths = Vec::new();
        let mut blobs = Vec::new();
        for entry in tree.split(|&b| b == 0).filter(|e| !e.is_empty()) {
            let entry = String::from_utf8_lossy(entry);
            let Some((meta, path)) = entry.split_once('\t') else { continue };
            let mut meta = meta.split(' ');
            let (_mode, kind, id) = (meta.next(), meta.next(), meta.next());
            if kind == Some("blob") && is_java(path) {
                paths.push(path.to_string());
                blobs.push(id.unwrap_or_default().to_string());
            }
        }
        let contents = if blobs.is_empty() { Vec::new() } else { self.read_blobs(&blobs)? };
        Ok(paths
            .into_iter()
            .zip(contents)
            .map(|(p, c)| (p, Arc::from(String::from_utf8_lossy(&c).as_ref())))
            .collect())
    }
}
