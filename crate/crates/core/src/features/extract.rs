use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::RwLock;

use log::{debug, warn};
use rayon::prelude::*;

use super::{as_dim, median_vector, DimVector, FeatureRow, PairKey, WINDOW_DAYS};
use crate::ku::{Detector, KuVector};
use crate::mining::{
    build_pairs, commits_in_window, is_java, CommitRecord, DevProjectPair, IdentityLink, MiningError, PullRequest,
    Repository, SECONDS_PER_DAY,
};

/// One mined project.
pub struct ProjectData {
    pub repo: Box<dyn Repository>,
    pub commits: Vec<CommitRecord>,
    /// `None` when no pull-request bundle was supplied.
    pub prs: Option<Vec<PullRequest>>,
    pub links: Vec<IdentityLink>,
}

impl ProjectData {
    pub fn new(repo: Box<dyn Repository>, prs: Option<Vec<PullRequest>>, links: Vec<IdentityLink>) -> Result<Self, MiningError> {
        let commits = repo.enumerate_commits()?;
        Ok(Self {
            repo,
            commits,
            prs,
            links,
        })
    }

    pub fn id(&self) -> &str {
        self.repo.project_id()
    }

    fn author_of(&self, username: &str) -> Option<&str> {
        self.links
            .iter()
            .find(|l| l.account_username == username)
            .map(|l| l.commit_author_name.as_str())
    }

    /// Latest commit authored strictly before `epoch`.
    fn latest_before(&self, epoch: i64) -> Option<&CommitRecord> {
        let n = self.commits.partition_point(|c| c.epoch() < epoch);
        n.checked_sub(1).map(|i| &self.commits[i])
    }
}

/// All projects available to a run, keyed by project id. Context projects
/// are consulted for previous-project lookups but yield no pairs.
#[derive(Default)]
pub struct Corpus {
    pub projects: BTreeMap<String, ProjectData>,
    pub context: BTreeSet<String>,
}

impl Corpus {
    pub fn insert(&mut self, project: ProjectData) {
        self.context.remove(project.id());
        self.projects.insert(project.id().to_string(), project);
    }

    pub fn insert_context(&mut self, project: ProjectData) {
        self.context.insert(project.id().to_string());
        self.projects.insert(project.id().to_string(), project);
    }

    /// Ids of the studied (non-context) projects.
    pub fn studied(&self) -> impl Iterator<Item = &str> {
        self.projects.keys().map(String::as_str).filter(|id| !self.context.contains(*id))
    }

    pub fn histories(&self) -> BTreeMap<String, Vec<CommitRecord>> {
        self.projects
            .iter()
            .map(|(id, p)| (id.clone(), p.commits.clone()))
            .collect()
    }

    /// Developer/project pairs of every studied project, with previous
    /// projects looked up across the whole corpus.
    pub fn pairs(&self) -> Vec<DevProjectPair> {
        let histories = self.histories();
        self.projects
            .iter()
            .filter(|(id, _)| !self.context.contains(*id))
            .flat_map(|(id, p)| build_pairs(id, &p.commits, &p.links, &histories))
            .collect()
    }
}

type CacheKey = (String, String);

/// Computes feature rows, caching per-commit KU sums so that a commit shared
/// by several developers' windows is analysed once.
pub struct FeatureExtractor {
    detector: Detector,
    window_days: u32,
    changed: RwLock<HashMap<CacheKey, KuVector>>,
    snapshots: RwLock<HashMap<CacheKey, KuVector>>,
}

impl FeatureExtractor {
    pub fn new(detector: Detector) -> Self {
        Self {
            detector,
            window_days: WINDOW_DAYS,
            changed: RwLock::new(HashMap::new()),
            snapshots: RwLock::new(HashMap::new()),
        }
    }

    /// Length of the activity window after the initial commit.
    pub fn with_window_days(mut self, days: u32) -> Self {
        assert!(days > 0, "window must be positive");
        self.window_days = days;
        self
    }

    pub fn window_days(&self) -> u32 {
        self.window_days
    }

    pub fn detector(&self) -> &Detector {
        &self.detector
    }

    fn cached(
        cache: &RwLock<HashMap<CacheKey, KuVector>>,
        key: CacheKey,
        compute: impl FnOnce() -> KuVector,
    ) -> KuVector {
        if let Some(v) = cache.read().unwrap().get(&key) {
            return *v;
        }
        let v = compute();
        cache.write().unwrap().insert(key, v);
        v
    }

    /// KU sum over the Java files `commit` changed, measured at its snapshot.
    pub fn commit_vector(&self, project: &ProjectData, commit: &CommitRecord) -> KuVector {
        let key = (project.id().to_string(), commit.id.clone());
        Self::cached(&self.changed, key, || {
            let paths: Vec<&str> = commit
                .changed_paths
                .iter()
                .map(String::as_str)
                .filter(|p| is_java(p))
                .collect();
            if paths.is_empty() {
                return KuVector::zero();
            }
            let snapshot = match project.repo.snapshot_files(&commit.id) {
                Ok(s) => s,
                Err(e) => {
                    warn!("{}: {e}", project.id());
                    return KuVector::zero();
                }
            };
            let index = self.detector.index(&snapshot);
            self.detector.detect_paths(&snapshot, &paths, &index).into_iter().sum()
        })
    }

    /// KU sum over every Java file of the snapshot at `commit`.
    pub fn snapshot_vector(&self, project: &ProjectData, commit: &CommitRecord) -> KuVector {
        let key = (project.id().to_string(), commit.id.clone());
        Self::cached(&self.snapshots, key, || match project.repo.snapshot_files(&commit.id) {
            Ok(s) => self.detector.detect_snapshot(&s),
            Err(e) => {
                warn!("{}: {e}", project.id());
                KuVector::zero()
            }
        })
    }

    fn sum_commits<'a>(&self, project: &ProjectData, commits: impl Iterator<Item = &'a CommitRecord>) -> KuVector {
        commits.map(|c| self.commit_vector(project, c)).sum()
    }

    pub fn dev_exp(&self, pair: &DevProjectPair, project: &ProjectData) -> DimVector {
        let window = commits_in_window(
            &project.commits,
            &pair.developer.commit_author_name,
            pair.initial_commit.author_time,
            self.window_days,
        );
        as_dim(&self.sum_commits(project, window.iter()))
    }

    /// Sum over `author`'s commits in `project` before `epoch`.
    fn prior_work(&self, project: &ProjectData, author: &str, epoch: i64) -> KuVector {
        self.sum_commits(
            project,
            project
                .commits
                .iter()
                .filter(|c| c.author_name == author && c.epoch() < epoch),
        )
    }

    fn previous<'a>(&self, pair: &DevProjectPair, corpus: &'a Corpus) -> Vec<&'a ProjectData> {
        pair.previous_projects
            .iter()
            .filter_map(|id| {
                let p = corpus.projects.get(id);
                if p.is_none() {
                    warn!("previous project {id} is not in the corpus");
                }
                p
            })
            .collect()
    }

    pub fn prev_exp(&self, pair: &DevProjectPair, corpus: &Corpus) -> DimVector {
        let epoch = pair.initial_commit.epoch();
        let sums: Vec<KuVector> = self
            .previous(pair, corpus)
            .into_iter()
            .map(|q| self.prior_work(q, &pair.developer.commit_author_name, epoch))
            .collect();
        median_vector(&sums)
    }

    /// `None` when the project has no pull-request data.
    pub fn collab_exp(&self, pair: &DevProjectPair, project: &ProjectData) -> Option<DimVector> {
        let prs = project.prs.as_ref()?;
        let me = pair.developer.account_username.as_str();
        let lo = pair.initial_commit.epoch();
        let hi = lo + i64::from(self.window_days) * SECONDS_PER_DAY;
        let collaborators: BTreeSet<&str> = prs
            .iter()
            .filter(|pr| pr.author == me && (lo..hi).contains(&pr.created_at.timestamp()))
            .flat_map(|pr| pr.comments.iter().map(|c| c.author.as_str()))
            .filter(|a| *a != me)
            .collect();
        let sums: Vec<KuVector> = collaborators
            .into_iter()
            .filter_map(|user| {
                let author = project.author_of(user);
                if author.is_none() {
                    debug!("collaborator {user} has no linked commit identity");
                }
                author
            })
            .map(|author| self.prior_work(project, author, lo))
            .collect();
        Some(median_vector(&sums))
    }

    pub fn proj(&self, pair: &DevProjectPair, project: &ProjectData) -> DimVector {
        match project.latest_before(pair.initial_commit.epoch()) {
            Some(c) => as_dim(&self.snapshot_vector(project, c)),
            None => [0.0; crate::ku::KU_COUNT],
        }
    }

    pub fn prev_proj(&self, pair: &DevProjectPair, corpus: &Corpus) -> DimVector {
        let epoch = pair.initial_commit.epoch();
        let sums: Vec<KuVector> = self
            .previous(pair, corpus)
            .into_iter()
            .map(|q| match q.latest_before(epoch) {
                Some(c) => self.snapshot_vector(q, c),
                None => KuVector::zero(),
            })
            .collect();
        median_vector(&sums)
    }

    pub fn row(&self, pair: &DevProjectPair, corpus: &Corpus) -> FeatureRow {
        let key = PairKey {
            project_id: pair.project_id.clone(),
            developer: pair.developer.account_username.clone(),
        };
        let Some(project) = corpus.projects.get(&pair.project_id) else {
            warn!("project {} is not in the corpus", pair.project_id);
            return FeatureRow::zeros(key);
        };
        FeatureRow {
            key,
            dev_exp: self.dev_exp(pair, project),
            prev_exp: self.prev_exp(pair, corpus),
            collab_exp: self.collab_exp(pair, project).unwrap_or([0.0; crate::ku::KU_COUNT]),
            proj: self.proj(pair, project),
            prev_proj: self.prev_proj(pair, corpus),
        }
    }

    pub fn rows(&self, pairs: &[DevProjectPair], corpus: &Corpus) -> Vec<FeatureRow> {
        pairs.par_iter().map(|p| self.row(p, corpus)).collect()
    }
}
