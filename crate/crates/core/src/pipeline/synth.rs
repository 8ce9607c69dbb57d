//! Synthetic corpora with planted long-time contributors.
//!
//! Every linked developer's tenure and commit rhythm are drawn from their
//! planted class, so the labels are known in advance. Planted LTCs write
//! mostly advanced Java (streams, concurrency, exceptions, generics, date
//! and time) during their first month; the others write mostly basic code.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::labeling::Setting;
use crate::learn::rng_for;
use crate::mining::{BundleCommit, Comment, CommitBundle, PrBundle, Profile, PullRequest, BUNDLE_VERSION, PR_BUNDLE_VERSION, SECONDS_PER_DAY};

const BASE_EPOCH: i64 = 1_420_070_400;
const SLOTS: usize = 20;
const MODULES: [&str; 3] = ["core", "util", "service"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Template {
    Basic,
    Loops,
    Streams,
    Concurrency,
    Exceptions,
    Generics,
    DateTime,
}

const BASIC: [Template; 2] = [Template::Basic, Template::Loops];
const ADVANCED: [Template; 5] = [
    Template::Streams,
    Template::Concurrency,
    Template::Exceptions,
    Template::Generics,
    Template::DateTime,
];

impl Template {
    fn name(self) -> &'static str {
        match self {
            Template::Basic => "Holder",
            Template::Loops => "Counter",
            Template::Streams => "Pipeline",
            Template::Concurrency => "Worker",
            Template::Exceptions => "Guard",
            Template::Generics => "Registry",
            Template::DateTime => "Calendar",
        }
    }

    fn source(self) -> &'static str {
        match self {
            Template::Basic => include_str!("templates/basic.java"),
            Template::Loops => include_str!("templates/loops.java"),
            Template::Streams => include_str!("templates/streams.java"),
            Template::Concurrency => include_str!("templates/concurrency.java"),
            Template::Exceptions => include_str!("templates/exceptions.java"),
            Template::Generics => include_str!("templates/generics.java"),
            Template::DateTime => include_str!("templates/datetime.java"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    pub n_projects: usize,
    pub n_devs: usize,
    pub ltc_fraction: f64,
    /// Projects used only as previous-project history.
    pub context_projects: usize,
    /// Chance that a first-month file of a planted LTC is advanced.
    pub ltc_advanced: f64,
    /// Chance that a first-month file of any other developer is advanced.
    pub other_advanced: f64,
}

impl SynthParams {
    pub fn new(seed: u64, n_projects: usize, n_devs: usize, ltc_fraction: f64) -> Self {
        Self {
            seed,
            n_projects,
            n_devs,
            ltc_fraction,
            context_projects: 2,
            ltc_advanced: 0.85,
            other_advanced: 0.05,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid synthesis parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Ground truth for one generated developer.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedDev {
    pub project_id: String,
    pub username: String,
    pub author_name: String,
    pub join: DateTime<Utc>,
    pub tenure_days: i64,
    pub ltc: bool,
}

impl PlantedDev {
    /// Expected label: planted LTCs whose tenure exceeds `T` years.
    pub fn expected(&self, setting: Setting) -> bool {
        self.ltc && self.tenure_days > 365 * i64::from(setting.years())
    }
}

#[derive(Debug, Clone)]
pub struct SynthSummary {
    pub dir: PathBuf,
    pub devs: Vec<PlantedDev>,
    pub projects: Vec<String>,
}

impl SynthSummary {
    pub fn planted_ltcs(&self) -> usize {
        self.devs.iter().filter(|d| d.ltc).count()
    }
}

fn at(day: f64) -> DateTime<Utc> {
    DateTime::from_timestamp(BASE_EPOCH + (day * SECONDS_PER_DAY as f64).round() as i64, 0).unwrap()
}

fn commit_id(project: &str, seq: usize) -> String {
    let digest = Sha256::digest(format!("{project}:{seq}").as_bytes());
    hex::encode(&digest[..20])
}

struct ProjectBuilder {
    id: String,
    package: String,
    commits: Vec<BundleCommit>,
    prs: Vec<PullRequest>,
}

impl ProjectBuilder {
    fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            package: format!("org.{}", id.replace('-', "")),
            commits: Vec::new(),
            prs: Vec::new(),
        }
    }

    fn java(&self, t: Template, module: usize, slot: usize, variant: u32) -> (String, String) {
        let class = format!("{}{slot}", t.name());
        let pkg = format!("{}.{}", self.package, MODULES[module]);
        let path = format!("src/main/java/{}/{class}.java", pkg.replace('.', "/"));
        let text = t
            .source()
            .replace("__P__", &pkg)
            .replace("__C__", &class)
            .replace("__N__", &variant.to_string());
        (path, text)
    }

    fn push(&mut self, author: &str, day: f64, files: BTreeMap<String, Option<String>>, message: &str) -> String {
        let id = commit_id(&self.id, self.commits.len());
        self.commits.push(BundleCommit {
            id: id.clone(),
            author_name: author.to_string(),
            author_time: at(day),
            message: message.to_string(),
            changed_paths: files.keys().cloned().collect(),
            files,
        });
        id
    }

    fn push_java(&mut self, rng: &mut impl Rng, author: &str, day: f64, t: Template) -> String {
        let (path, text) = self.java(t, rng.gen_range(0..MODULES.len()), rng.gen_range(0..SLOTS), rng.gen_range(1..1000));
        self.push(author, day, BTreeMap::from([(path.clone(), Some(text))]), "update sources");
        path
    }

    fn push_note(&mut self, author: &str, day: f64, name: &str) {
        let path = format!("docs/{name}.md");
        let text = format!("# {name}\n\nday {day:.0}\n");
        self.push(author, day, BTreeMap::from([(path, Some(text))]), "docs");
    }

    fn bundle(mut self) -> (CommitBundle, Vec<PullRequest>) {
        self.commits
            .sort_by(|a, b| (a.author_time, &a.id).cmp(&(b.author_time, &b.id)));
        self.prs.sort_by_key(|p| p.pr_id);
        (
            CommitBundle {
                version: BUNDLE_VERSION,
                project_id: self.id,
                commits: self.commits,
            },
            self.prs,
        )
    }
}

fn pick(rng: &mut impl Rng, advanced_p: f64) -> Template {
    if rng.gen_bool(advanced_p) {
        *ADVANCED.choose(rng).unwrap()
    } else {
        *BASIC.choose(rng).unwrap()
    }
}

fn check(p: &SynthParams) -> Result<(), SynthError> {
    let bad = |m: &str| Err(SynthError::InvalidParams(m.to_string()));
    if p.n_projects == 0 || p.n_devs == 0 {
        return bad("n_projects and n_devs must be positive");
    }
    if !(p.ltc_fraction > 0.0 && p.ltc_fraction < 1.0) {
        return bad("ltc_fraction must lie in (0, 1)");
    }
    if !(0.0..=1.0).contains(&p.ltc_advanced) || !(0.0..=1.0).contains(&p.other_advanced) {
        return bad("advanced-file probabilities must lie in [0, 1]");
    }
    Ok(())
}

/// Plans developers: exactly `round(ltc_fraction * n_devs)` planted LTCs,
/// round-robin over projects.
fn plan_devs(p: &SynthParams, rng: &mut impl Rng) -> Vec<PlantedDev> {
    let n_ltc = (p.ltc_fraction * p.n_devs as f64).round() as usize;
    let mut order: Vec<usize> = (0..p.n_devs).collect();
    order.shuffle(rng);
    let mut is_ltc = vec![false; p.n_devs];
    for &i in &order[..n_ltc] {
        is_ltc[i] = true;
    }
    let mut ltc_seen = 0usize;
    (0..p.n_devs)
        .map(|i| {
            let ltc = is_ltc[i];
            let join_day = rng.gen_range(30.0..730.0);
            let tenure_days = if ltc {
                let band = ltc_seen % 3;
                ltc_seen += 1;
                match band {
                    0 => rng.gen_range(400..=700),
                    1 => rng.gen_range(760..=1050),
                    _ => rng.gen_range(1120..=1400),
                }
            } else {
                rng.gen_range(0..=300)
            };
            PlantedDev {
                project_id: format!("proj-{:02}", i % p.n_projects),
                username: format!("dev{i:04}"),
                author_name: format!("Dev {i:04}"),
                join: at(join_day),
                tenure_days,
                ltc,
            }
        })
        .collect()
}

fn day_of(t: DateTime<Utc>) -> f64 {
    (t.timestamp() - BASE_EPOCH) as f64 / SECONDS_PER_DAY as f64
}

fn build_project(
    id: &str,
    devs: &[&PlantedDev],
    p: &SynthParams,
    rng: &mut impl Rng,
) -> (CommitBundle, Vec<PullRequest>, BTreeMap<String, [f64; 2]>) {
    let mut b = ProjectBuilder::new(id);
    let founder = format!("Founder {id}");
    b.push_java(rng, &founder, 0.0, Template::Basic);
    let mut window_stats: BTreeMap<String, [f64; 2]> = BTreeMap::new();
    let mut end = 1.0f64;
    let mut pr_id = 1u64;
    let mut by_join: Vec<&PlantedDev> = devs.to_vec();
    by_join.sort_by_key(|d| d.join);
    for (k, d) in by_join.iter().enumerate() {
        let join = day_of(d.join);
        let last = join + d.tenure_days as f64;
        end = end.max(last);
        let adv = if d.ltc { p.ltc_advanced } else { p.other_advanced };
        let t = pick(rng, adv);
        let mut paths = vec![b.push_java(rng, &d.author_name, join, t)];
        let extra = rng.gen_range(1..=2);
        let mut window_days: Vec<f64> = (0..extra).map(|_| join + rng.gen_range(2.0..25.0)).collect();
        window_days.sort_by(f64::total_cmp);
        for &day in window_days.iter().filter(|&&day| day < last || d.ltc) {
            let t = pick(rng, adv);
            paths.push(b.push_java(rng, &d.author_name, day, t));
        }
        let step = if d.ltc { (50.0, 70.0) } else { (20.0, 40.0) };
        let mut day = join + 30.0 + rng.gen_range(0.0..step.0);
        while day < last {
            if rng.gen_bool(0.5) {
                let t = pick(rng, adv);
                b.push_java(rng, &d.author_name, day, t);
            } else {
                b.push_note(&d.author_name, day, &format!("notes-{}", d.username));
            }
            day += rng.gen_range(step.0..step.1);
        }
        if d.tenure_days > 0 {
            b.push_note(&d.author_name, last, &format!("notes-{}", d.username));
        }
        let earlier: Vec<&str> = by_join[..k].iter().map(|e| e.username.as_str()).collect();
        let n_prs = rng.gen_range(1..=2);
        for _ in 0..n_prs {
            let created = join + rng.gen_range(1.0..28.0);
            let mut comments = Vec::new();
            for c in earlier.choose_multiple(rng, 2.min(earlier.len())) {
                comments.push(Comment {
                    author: c.to_string(),
                    created_at: at(created + rng.gen_range(0.05..2.0)),
                    body: "looks good".into(),
                });
            }
            b.prs.push(PullRequest {
                pr_id,
                author: d.username.clone(),
                created_at: at(created),
                changed_files: paths.clone(),
                comments,
            });
            pr_id += 1;
        }
        window_stats.insert(d.username.clone(), [paths.len() as f64, n_prs as f64]);
    }
    let per_month = (devs.len() + 1) / 50 + 1;
    let mut month = 0.0;
    let mut drive_by = 0usize;
    while month < end + 400.0 {
        for _ in 0..per_month {
            let day = month + rng.gen_range(0.0..30.0);
            b.push_note(&format!("Visitor {id} {drive_by:05}"), day, &format!("visit-{drive_by}"));
            drive_by += 1;
        }
        month += 30.0;
    }
    let (bundle, prs) = b.bundle();
    (bundle, prs, window_stats)
}

fn build_context(id: &str, devs: &[PlantedDev], rng: &mut impl Rng) -> CommitBundle {
    let mut b = ProjectBuilder::new(id);
    b.push_java(rng, &format!("Founder {id}"), -800.0, Template::Basic);
    for d in devs {
        if !rng.gen_bool(0.4) {
            continue;
        }
        let join = day_of(d.join);
        for _ in 0..rng.gen_range(1..=3) {
            let day = join - rng.gen_range(30.0..400.0);
            let t = pick(rng, 0.5);
            b.push_java(rng, &d.author_name, day, t);
        }
    }
    b.bundle().0
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializes");
    text.push('\n');
    std::fs::write(path, text)
}

/// Writes `repos/`, `context/`, `prs/`, `profiles.json`, `truth.csv`,
/// `external.csv` and a ready-to-run `kultc.toml` under `out`.
pub fn synth_corpus(params: &SynthParams, out: &Path) -> Result<SynthSummary, SynthError> {
    check(params)?;
    let mut rng = rng_for(params.seed, 0);
    let devs = plan_devs(params, &mut rng);
    for sub in ["repos", "context", "prs"] {
        std::fs::create_dir_all(out.join(sub))?;
    }
    let projects: Vec<String> = (0..params.n_projects).map(|i| format!("proj-{i:02}")).collect();
    let mut external: BTreeMap<(String, String), [f64; 2]> = BTreeMap::new();
    for (i, id) in projects.iter().enumerate() {
        let mine: Vec<&PlantedDev> = devs.iter().filter(|d| &d.project_id == id).collect();
        let mut prng = rng_for(params.seed, 1 + i as u64);
        let (bundle, prs, stats) = build_project(id, &mine, params, &mut prng);
        bundle.write(&out.join("repos").join(format!("{id}.json")))?;
        write_json(
            &out.join("prs").join(format!("{id}.json")),
            &PrBundle {
                version: PR_BUNDLE_VERSION,
                project_id: Some(id.clone()),
                pull_requests: prs,
            },
        )?;
        for (user, s) in stats {
            external.insert((id.clone(), user), s);
        }
    }
    for c in 0..params.context_projects {
        let id = format!("ctx-{c:02}");
        let mut crng = rng_for(params.seed, 1000 + c as u64);
        build_context(&id, &devs, &mut crng).write(&out.join("context").join(format!("{id}.json")))?;
    }
    let mut profiles: Vec<Profile> = devs
        .iter()
        .map(|d| Profile {
            username: d.username.clone(),
            display_name: d.author_name.clone(),
        })
        .collect();
    profiles.push(Profile {
        username: "lurker".into(),
        display_name: "Nobody Here".into(),
    });
    write_json(&out.join("profiles.json"), &profiles)?;

    let mut truth = csv::Writer::from_path(out.join("truth.csv")).map_err(csv_io)?;
    truth
        .write_record(["project_id", "developer", "author_name", "join_time", "tenure_days", "planted_ltc", "LTC-1", "LTC-2", "LTC-3"])
        .map_err(csv_io)?;
    let mut ext = csv::Writer::from_path(out.join("external.csv")).map_err(csv_io)?;
    ext.write_record(["project_id", "developer", "window_files", "window_prs", "account_age_days"])
        .map_err(csv_io)?;
    let mut xrng = rng_for(params.seed, 2000);
    for d in &devs {
        let mut rec = vec![
            d.project_id.clone(),
            d.username.clone(),
            d.author_name.clone(),
            crate::mining::timestamp::format(&d.join),
            d.tenure_days.to_string(),
            d.ltc.to_string(),
        ];
        rec.extend(Setting::ALL.iter().map(|s| d.expected(*s).to_string()));
        truth.write_record(&rec).map_err(csv_io)?;
        let s = external
            .get(&(d.project_id.clone(), d.username.clone()))
            .copied()
            .unwrap_or_default();
        let age = xrng.gen_range(100.0..3000.0) + if d.ltc { 400.0 } else { 0.0 };
        ext.write_record([
            d.project_id.clone(),
            d.username.clone(),
            s[0].to_string(),
            s[1].to_string(),
            format!("{age:.0}"),
        ])
        .map_err(csv_io)?;
    }
    truth.flush()?;
    ext.flush()?;
    std::fs::write(
        out.join("kultc.toml"),
        format!(
            "seed = {}\noutput_dir = \"run\"\n\n[input]\ncorpus = \".\"\nexternal_features = \"external.csv\"\n",
            params.seed
        ),
    )?;
    Ok(SynthSummary {
        dir: out.to_path_buf(),
        devs,
        projects,
    })
}

fn csv_io(e: csv::Error) -> SynthError {
    SynthError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ltc_count() {
        let mut rng = rng_for(3, 0);
        let devs = plan_devs(&SynthParams::new(3, 2, 40, 0.5), &mut rng);
        assert_eq!(devs.iter().filter(|d| d.ltc).count(), 20);
        assert!(devs.iter().filter(|d| d.ltc).all(|d| d.tenure_days > 365));
        assert!(devs.iter().filter(|d| !d.ltc).all(|d| d.tenure_days <= 300));
    }

    #[test]
    fn templates_fill_placeholders() {
        let b = ProjectBuilder::new("proj-00");
        for t in BASIC.iter().chain(&ADVANCED) {
            let (path, text) = b.java(*t, 1, 3, 7);
            assert!(path.ends_with(&format!("{}3.java", t.name())));
            assert!(!text.contains("__"));
            assert!(text.contains("package org.proj00.util;"));
        }
    }

    #[test]
    fn rejects_bad_fraction() {
        let dir = std::env::temp_dir();
        assert!(matches!(
            synth_corpus(&SynthParams::new(1, 1, 1, 1.0), &dir),
            Err(SynthError::InvalidParams(_))
        ));
    }
}
