use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use super::config::{ResolvedInputs, RunConfig};
use super::manifest::{file_digest, stage_seed, RunManifest, StageRecord};
use super::{report, PipelineError};
use crate::analysis::{
    cliffs_delta, dimension_importance, explain, mean_normalized_improvement, scott_knott_esd, wilcoxon_signed_rank,
    DimensionImportance, Magnitude, OutputSpace, RankTable, ShapMatrix, SkEsdConfig,
};
use crate::features::{assemble_matrix, Corpus, Dimension, FeatureExtractor, FeatureMatrix, PairKey, ProjectData};
use crate::ku::{Detector, KuVector, Ruleset, KU_COUNT};
use crate::labeling::{label_ltc_with, write_labels_csv, Setting};
use crate::learn::{
    autospearman, bootstrap_plan, grid_search, permutation_control, run_experiment, train, AucTable, Dataset,
    GridSpec, Learner, Model, ModelKind, ModelSpec, Params, SelectionResult,
};
use crate::mining::{link_identities, load_pr_bundle, load_profiles, open_repository, OpenOptions};

pub const OUTPUT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Mine,
    Detect,
    Features,
    Label,
    Select,
    Train,
    Evaluate,
    Compare,
    Explain,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::Mine,
        Stage::Detect,
        Stage::Features,
        Stage::Label,
        Stage::Select,
        Stage::Train,
        Stage::Evaluate,
        Stage::Compare,
        Stage::Explain,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Mine => "mine",
            Stage::Detect => "detect",
            Stage::Features => "features",
            Stage::Label => "label",
            Stage::Select => "select",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Compare => "compare",
            Stage::Explain => "explain",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A required file from an earlier stage is absent.
#[derive(Debug)]
struct Missing(PathBuf);

impl fmt::Display for Missing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "missing {}", self.0.display())
    }
}

impl std::error::Error for Missing {}

/// Feature set names as they appear in model names.
const KULTC: &str = "kultc";
const BAOLTC: &str = "baoltc";
const COMBINED: &str = "combined";
const PERMUTED: &str = "permuted";

/// A trained model with the columns it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub version: u32,
    pub setting: Setting,
    pub name: String,
    pub params: Params,
    pub columns: Vec<String>,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub baseline: String,
    pub repetitions: usize,
    pub median_model: f64,
    pub median_baseline: f64,
    pub wilcoxon_p: f64,
    pub cliffs_delta: f64,
    pub magnitude: Magnitude,
    /// Mean normalized AUC improvement in percent; absent when a baseline
    /// AUC is 1.
    pub improvement_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub version: u32,
    pub zero_differences: String,
    pub comparisons: Vec<ComparisonRow>,
    /// SK-ESD ranks of the models of each setting.
    pub rankings: BTreeMap<String, RankTable>,
}

fn group_of(model: &str) -> &str {
    model.split_once('/').map_or("all", |(g, _)| g)
}

/// Paired comparisons of `model:baseline` pairs (full model names) and
/// SK-ESD ranks per setting.
pub fn compare_aucs(table: &AucTable, pairs: &[(String, String)], ranking: &SkEsdConfig) -> anyhow::Result<StatsFile> {
    let mut comparisons = Vec::new();
    for (model, baseline) in pairs {
        let (a, b) = (table.aucs(model), table.aucs(baseline));
        if a.is_empty() || b.is_empty() {
            bail!("no AUCs for {}", if a.is_empty() { model } else { baseline });
        }
        let d = cliffs_delta(&a, &b)?;
        comparisons.push(ComparisonRow {
            model: model.clone(),
            baseline: baseline.clone(),
            repetitions: a.len(),
            median_model: table.median(model).unwrap(),
            median_baseline: table.median(baseline).unwrap(),
            wilcoxon_p: wilcoxon_signed_rank(&a, &b)?,
            cliffs_delta: d.d,
            magnitude: d.magnitude,
            improvement_pct: mean_normalized_improvement(&a, &b).ok(),
        });
    }
    let mut groups: BTreeMap<String, Vec<(String, Vec<f64>)>> = BTreeMap::new();
    for m in table.models() {
        groups
            .entry(group_of(&m).to_string())
            .or_default()
            .push((m.clone(), table.aucs(&m)));
    }
    Ok(StatsFile {
        version: OUTPUT_VERSION,
        zero_differences: "dropped".into(),
        comparisons,
        rankings: groups
            .into_iter()
            .map(|(g, ts)| (g, scott_knott_esd(&ts, ranking)))
            .collect(),
    })
}

/// Column names of each dimension, keyed by dimension name.
pub fn dimension_columns() -> BTreeMap<String, Vec<String>> {
    Dimension::ALL
        .iter()
        .map(|d| (d.to_string(), (1..=KU_COUNT).map(|k| format!("{}_K{k}", d.prefix())).collect()))
        .collect()
}

/// SHAP attributions of `model` on `data` and their per-dimension ranking.
pub fn explain_model(
    model: &Model,
    data: &Dataset,
    seed: u64,
    ranking: &SkEsdConfig,
) -> anyhow::Result<(ShapMatrix, DimensionImportance)> {
    let shap = explain(model, data, data, seed)?;
    let importance = dimension_importance(&shap, &dimension_columns(), ranking)?;
    Ok((shap, importance))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ImportanceFile {
    version: u32,
    setting: Setting,
    model: String,
    output_space: OutputSpace,
    base_value: f64,
    records: usize,
    ranks: RankTable,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct SettingSelection {
    #[serde(skip_serializing_if = "Option::is_none")]
    kultc: Option<SelectionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baoltc: Option<SelectionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combined: Option<SelectionResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SelectionFile {
    version: u32,
    settings: BTreeMap<Setting, SettingSelection>,
}

/// Baseline features keyed by pair.
struct External {
    columns: Vec<String>,
    rows: BTreeMap<PairKey, Vec<f64>>,
}

impl External {
    fn parse(bytes: &[u8]) -> anyhow::Result<Self> {
        let mut r = csv::Reader::from_reader(bytes);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < 3 || header[0] != "project_id" || header[1] != "developer" {
            bail!("external features need project_id,developer and at least one feature column");
        }
        let columns = header[2..].to_vec();
        let mut rows = BTreeMap::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let values = rec
                .iter()
                .skip(2)
                .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| anyhow!("external features row {}: non-numeric value", i + 2))?;
            let key = PairKey {
                project_id: rec[0].to_string(),
                developer: rec[1].to_string(),
            };
            if rows.insert(key.clone(), values).is_some() {
                bail!("external features list {}/{} twice", key.project_id, key.developer);
            }
        }
        Ok(Self { columns, rows })
    }
}

struct Loaded {
    corpus: Corpus,
    inputs: BTreeMap<String, String>,
    warnings: Vec<String>,
}

/// Datasets of one setting, one per feature set, all columns.
struct SettingData {
    sets: BTreeMap<&'static str, Dataset>,
}

/// A run directory bound to a configuration.
pub struct Run<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
    inputs: ResolvedInputs,
    manifest: RunManifest,
    loaded: Option<Loaded>,
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("serializes");
    text.push('\n');
    text.into_bytes()
}

fn usable(ds: &Dataset) -> Result<(), String> {
    let pos = ds.positives();
    let neg = ds.n() - pos;
    if pos < 2 || neg < 2 {
        Err(format!("{pos} positive and {neg} negative pairs"))
    } else {
        Ok(())
    }
}

impl<'a> Run<'a> {
    /// Opens `out` (or the configured output directory), keeping the
    /// manifest of earlier stages when it was written for the same config.
    pub fn open(cfg: &'a RunConfig, out: Option<&Path>) -> Result<Self, PipelineError> {
        let mut run = Self::create(cfg, out)?;
        if let Some(m) = RunManifest::load(&run.dir.join("manifest.json")) {
            if m.config == run.manifest.config {
                run.manifest = m;
            }
        }
        Ok(run)
    }

    /// Like [`open`](Self::open) but starts a fresh manifest.
    pub fn create(cfg: &'a RunConfig, out: Option<&Path>) -> Result<Self, PipelineError> {
        let inputs = cfg.inputs()?;
        let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_path());
        std::fs::create_dir_all(&dir).map_err(|e| PipelineError::Stage {
            stage: "setup",
            message: format!("cannot create {}: {e}", dir.display()),
        })?;
        Ok(Self {
            cfg,
            dir,
            inputs,
            manifest: RunManifest::new(cfg.snapshot(), cfg.seed),
            loaded: None,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    pub fn into_manifest(self) -> RunManifest {
        self.manifest
    }

    pub fn execute(&mut self, stage: Stage) -> Result<(), PipelineError> {
        log::info!("stage {stage}");
        let mut rec = StageRecord::default();
        let result = match stage {
            Stage::Mine => self.mine(&mut rec),
            Stage::Detect => self.detect(&mut rec),
            Stage::Features => self.features(&mut rec),
            Stage::Label => self.label(&mut rec),
            Stage::Select => self.select(&mut rec),
            Stage::Train => self.train(&mut rec),
            Stage::Evaluate => self.evaluate(&mut rec),
            Stage::Compare => self.compare(&mut rec),
            Stage::Explain => self.explain(&mut rec),
            Stage::Report => self.report(&mut rec),
        };
        if let Err(e) = result {
            if let Some(Missing(p)) = e.downcast_ref::<Missing>() {
                return Err(PipelineError::MissingStageOutput(p.clone()));
            }
            return Err(PipelineError::Stage {
                stage: stage.name(),
                message: format!("{e:#}"),
            });
        }
        for w in &rec.warnings {
            log::warn!("{stage}: {w}");
        }
        self.manifest.record(stage.name(), rec);
        self.manifest
            .write(&self.dir.join("manifest.json"))
            .map_err(|e| PipelineError::Stage {
                stage: stage.name(),
                message: format!("cannot write manifest: {e}"),
            })
    }

    fn input_name(&self, p: &Path) -> String {
        p.strip_prefix(&self.cfg.base_dir)
            .unwrap_or(p)
            .to_string_lossy()
            .replace('\\', "/")
    }

    fn record_input(&self, rec: &mut StageRecord, p: &Path) -> anyhow::Result<()> {
        let digest = file_digest(p).with_context(|| format!("reading {}", p.display()))?;
        rec.inputs.insert(self.input_name(p), digest);
        Ok(())
    }

    fn read(&self, rec: &mut StageRecord, rel: &str) -> anyhow::Result<Vec<u8>> {
        let path = self.dir.join(rel);
        if !path.exists() {
            return Err(Missing(path).into());
        }
        let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        rec.inputs.insert(rel.to_string(), file_digest(&path)?);
        Ok(bytes)
    }

    fn write(&self, rec: &mut StageRecord, rel: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        rec.outputs.insert(rel.to_string(), file_digest(&path)?);
        Ok(())
    }

    fn detector(&self, rec: &mut StageRecord) -> anyhow::Result<Detector> {
        match &self.inputs.ruleset {
            Some(p) => {
                self.record_input(rec, p)?;
                Ok(Detector::new(Ruleset::load(p)?))
            }
            None => Ok(Detector::with_default_rules()),
        }
    }

    fn load_corpus(&self) -> anyhow::Result<Loaded> {
        let mut inputs = BTreeMap::new();
        let mut warnings = Vec::new();
        let profiles = load_profiles(&self.inputs.profiles)
            .with_context(|| format!("profiles {}", self.inputs.profiles.display()))?;
        inputs.insert(self.input_name(&self.inputs.profiles), file_digest(&self.inputs.profiles)?);
        let opts = OpenOptions {
            no_merges: self.cfg.input.no_merges,
            project_id: None,
        };
        let mut corpus = Corpus::default();
        let all = self
            .inputs
            .repos
            .iter()
            .map(|p| (p, false))
            .chain(self.inputs.context_repos.iter().map(|p| (p, true)));
        for (path, context) in all {
            let repo = open_repository(path, &opts).with_context(|| format!("repository {}", path.display()))?;
            if path.is_file() {
                inputs.insert(self.input_name(path), file_digest(path)?);
            }
            let id = repo.project_id().to_string();
            if corpus.projects.contains_key(&id) {
                bail!("project id {id} appears twice");
            }
            let pr_path = self.inputs.prs.get(&id).cloned().or_else(|| {
                self.inputs
                    .prs_dir
                    .as_ref()
                    .map(|d| d.join(format!("{id}.json")))
                    .filter(|p| p.exists())
            });
            let prs = match (&pr_path, context) {
                (_, true) => None,
                (Some(p), false) => {
                    inputs.insert(self.input_name(p), file_digest(p)?);
                    Some(load_pr_bundle(p).with_context(|| format!("pull requests {}", p.display()))?)
                }
                (None, false) => {
                    warnings.push(format!("no pull-request bundle for {id}; COLLAB_EXP is zero"));
                    None
                }
            };
            let mut project = ProjectData::new(repo, prs, Vec::new()).with_context(|| format!("project {id}"))?;
            project.links = link_identities(project.commits.iter().map(|c| c.author_name.as_str()), &profiles);
            if context {
                corpus.insert_context(project);
            } else {
                corpus.insert(project);
            }
        }
        Ok(Loaded {
            corpus,
            inputs,
            warnings,
        })
    }

    fn corpus(&mut self, rec: &mut StageRecord) -> anyhow::Result<&Corpus> {
        if self.loaded.is_none() {
            self.loaded = Some(self.load_corpus()?);
        }
        let loaded = self.loaded.as_ref().unwrap();
        rec.inputs.extend(loaded.inputs.iter().map(|(k, v)| (k.clone(), v.clone())));
        rec.warnings.extend(loaded.warnings.iter().cloned());
        Ok(&loaded.corpus)
    }

    fn mine(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let corpus = self.corpus(rec)?;
        let pairs = corpus.pairs();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["project_id", "developer", "author_name", "initial_commit", "initial_time", "previous_projects"])?;
        for p in &pairs {
            w.write_record([
                p.project_id.as_str(),
                p.developer.account_username.as_str(),
                p.developer.commit_author_name.as_str(),
                p.initial_commit.id.as_str(),
                &crate::mining::timestamp::format(&p.initial_commit.author_time),
                &p.previous_projects.join(";"),
            ])?;
        }
        let pairs_csv = w.into_inner()?;
        let projects: Vec<serde_json::Value> = corpus
            .projects
            .iter()
            .map(|(id, p)| {
                let authors: std::collections::BTreeSet<&str> = p.commits.iter().map(|c| c.author_name.as_str()).collect();
                serde_json::json!({
                    "project_id": id,
                    "role": if corpus.context.contains(id) { "context" } else { "studied" },
                    "commits": p.commits.len(),
                    "authors": authors.len(),
                    "linked_developers": p.links.len(),
                    "pull_requests": p.prs.as_ref().map(Vec::len),
                })
            })
            .collect();
        let summary = serde_json::json!({
            "version": OUTPUT_VERSION,
            "projects": projects,
            "pairs": pairs.len(),
        });
        if pairs.is_empty() {
            rec.warnings.push("no linked developers; later stages have nothing to learn from".into());
        }
        self.write(rec, "pairs.csv", &pairs_csv)?;
        self.write(rec, "mine.json", &to_json(&summary))
    }

    fn detect(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let detector = self.detector(rec)?;
        let corpus = self.corpus(rec)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["project_id".to_string(), "commit".into(), "java_files".into()];
        header.extend(KuVector::header());
        w.write_record(&header)?;
        for id in corpus.studied() {
            let p = &corpus.projects[id];
            let Some(head) = p.commits.last() else { continue };
            let files = p.repo.snapshot_files(&head.id)?;
            let v = detector.detect_snapshot(&files);
            let mut row = vec![
                id.to_string(),
                head.id.clone(),
                files.keys().filter(|f| f.ends_with(".java")).count().to_string(),
            ];
            row.extend(v.to_record());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner()?;
        self.write(rec, "kus.csv", &bytes)
    }

    fn features(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let window = self.cfg.features.window_days;
        let extractor = FeatureExtractor::new(self.detector(rec)?).with_window_days(window);
        let corpus = self.corpus(rec)?;
        let rows = extractor.rows(&corpus.pairs(), corpus);
        let matrix = assemble_matrix(rows, &BTreeMap::new())?;
        let mut buf = Vec::new();
        matrix.write_csv(&mut buf)?;
        let sidecar = matrix.sidecar(window);
        self.write(rec, "matrix.csv", &buf)?;
        self.write(rec, "matrix.json", &to_json(&sidecar))
    }

    fn label(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let settings = self.cfg.settings();
        let rule = self.cfg.label_rule();
        let corpus = self.corpus(rec)?;
        let pairs = corpus.pairs();
        let mut labels = Vec::new();
        for p in &pairs {
            let commits = &corpus.projects[&p.project_id].commits;
            for s in &settings {
                labels.push(label_ltc_with(p, commits, *s, &rule));
            }
        }
        let rows: Vec<_> = pairs
            .iter()
            .flat_map(|p| std::iter::repeat(p).take(settings.len()))
            .zip(labels.iter())
            .collect();
        for s in &settings {
            let pos = labels.iter().filter(|l| l.setting == *s && l.is_ltc).count();
            if pos == 0 {
                rec.warnings.push(format!("{s}: no developer qualifies"));
            }
        }
        let mut buf = Vec::new();
        write_labels_csv(&mut buf, &rows)?;
        self.write(rec, "labels.csv", &buf)
    }

    fn labeled_matrix(&self, rec: &mut StageRecord) -> anyhow::Result<FeatureMatrix> {
        let mut m = FeatureMatrix::read_csv(&self.read(rec, "matrix.csv")?[..])?;
        let bytes = self.read(rec, "labels.csv")?;
        let mut labels: BTreeMap<PairKey, BTreeMap<Setting, bool>> = BTreeMap::new();
        let mut r = csv::Reader::from_reader(&bytes[..]);
        for row in r.records() {
            let row = row?;
            let setting: Setting = row[2].parse().map_err(|e: String| anyhow!(e))?;
            let key = PairKey {
                project_id: row[0].to_string(),
                developer: row[1].to_string(),
            };
            labels.entry(key).or_default().insert(setting, &row[3] == "true");
        }
        for row in &mut m.rows {
            row.labels = labels.get(&row.key).cloned().unwrap_or_default();
        }
        Ok(m)
    }

    fn external(&self, rec: &mut StageRecord) -> anyhow::Result<Option<External>> {
        let Some(p) = &self.inputs.external_features else {
            return Ok(None);
        };
        self.record_input(rec, p)?;
        let ext = External::parse(&std::fs::read(p)?).with_context(|| format!("external features {}", p.display()))?;
        Ok(Some(ext))
    }

    /// Labelled datasets of `setting` per feature set, or a reason to skip.
    fn setting_data(&self, m: &FeatureMatrix, ext: Option<&External>, s: Setting) -> anyhow::Result<Result<SettingData, String>> {
        let kultc = m.dataset(s);
        if let Err(why) = usable(&kultc) {
            return Ok(Err(format!("{s} skipped: {why}")));
        }
        let mut sets = BTreeMap::from([(KULTC, kultc.clone())]);
        if let Some(ext) = ext {
            if let Some(c) = ext.columns.iter().find(|c| m.column_names.contains(c)) {
                bail!("external column {c} clashes with a KU column");
            }
            let mut bx = Vec::new();
            for r in m.rows.iter().filter(|r| r.labels.contains_key(&s)) {
                let v = ext
                    .rows
                    .get(&r.key)
                    .ok_or_else(|| anyhow!("external features lack {}/{}", r.key.project_id, r.key.developer))?;
                if v.len() != ext.columns.len() {
                    bail!("external features row {}/{} is ragged", r.key.project_id, r.key.developer);
                }
                bx.push(v.clone());
            }
            let mut cols = kultc.columns.clone();
            cols.extend(ext.columns.iter().cloned());
            let cx = kultc.x.iter().zip(&bx).map(|(a, b)| a.iter().chain(b).copied().collect()).collect();
            sets.insert(BAOLTC, Dataset::new(ext.columns.clone(), bx, kultc.y.clone()));
            sets.insert(COMBINED, Dataset::new(cols, cx, kultc.y.clone()));
        }
        Ok(Ok(SettingData { sets }))
    }

    fn selection(&self, rec: &mut StageRecord) -> anyhow::Result<SelectionFile> {
        Ok(serde_json::from_slice(&self.read(rec, "selection.json")?)?)
    }

    fn select(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let m = self.labeled_matrix(rec)?;
        let ext = self.external(rec)?;
        let (sp, vif) = (self.cfg.selection.spearman, self.cfg.selection.vif);
        let mut settings = BTreeMap::new();
        for s in self.cfg.settings() {
            let data = match self.setting_data(&m, ext.as_ref(), s)? {
                Ok(d) => d,
                Err(why) => {
                    rec.warnings.push(why);
                    continue;
                }
            };
            let pick = |name: &str| data.sets.get(name).map(|d| autospearman(d, sp, vif));
            settings.insert(
                s,
                SettingSelection {
                    kultc: pick(KULTC),
                    baoltc: pick(BAOLTC),
                    combined: pick(COMBINED),
                },
            );
        }
        let file = SelectionFile {
            version: OUTPUT_VERSION,
            settings,
        };
        self.write(rec, "selection.json", &to_json(&file))
    }

    fn kultc_data(&self, m: &FeatureMatrix, sel: &SettingSelection, s: Setting) -> anyhow::Result<Dataset> {
        let kept = &sel.kultc.as_ref().ok_or_else(|| anyhow!("{s}: no KU selection"))?.kept_columns;
        Ok(m.dataset(s).select(kept))
    }

    fn params(&self, kind: ModelKind, data: &Dataset, seed: u64) -> anyhow::Result<Params> {
        if self.cfg.evaluation.tune {
            Ok(grid_search(&GridSpec::standard(kind), data, seed)?.best)
        } else {
            Ok(kind.default_params())
        }
    }

    fn train(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let m = self.labeled_matrix(rec)?;
        let selection = self.selection(rec)?;
        let seed = stage_seed(self.cfg.seed, "train");
        rec.seed = Some(seed);
        for (s, sel) in &selection.settings {
            let data = self.kultc_data(&m, sel, *s)?;
            for kind in &self.cfg.evaluation.models {
                let params = self.params(*kind, &data, seed)?;
                let model = train(&params, &data, seed)?;
                let name = format!("{KULTC}-{kind}");
                let saved = SavedModel {
                    version: OUTPUT_VERSION,
                    setting: *s,
                    name: name.clone(),
                    params,
                    columns: data.columns.clone(),
                    model,
                };
                self.write(rec, &format!("models/{s}/{name}.json"), &to_json(&saved))?;
            }
        }
        Ok(())
    }

    fn evaluate(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let m = self.labeled_matrix(rec)?;
        let ext = self.external(rec)?;
        let selection = self.selection(rec)?;
        let ev = &self.cfg.evaluation;
        let root = stage_seed(self.cfg.seed, "evaluate");
        rec.seed = Some(root);
        let mut table = AucTable::default();
        for (s, sel) in &selection.settings {
            let data = match self.setting_data(&m, ext.as_ref(), *s)? {
                Ok(d) => d,
                Err(why) => bail!("selection exists but {why}"),
            };
            let learner = |kind: ModelKind| {
                if ev.tune {
                    Learner::Tuned(GridSpec::standard(kind))
                } else {
                    Learner::Fixed(kind.default_params())
                }
            };
            let mut specs = Vec::new();
            for (set, choice) in [(KULTC, &sel.kultc), (BAOLTC, &sel.baoltc), (COMBINED, &sel.combined)] {
                let Some(choice) = choice else { continue };
                let kinds: &[ModelKind] = if set == KULTC { &ev.models } else { &ev.models[..1] };
                for kind in kinds {
                    specs.push(ModelSpec::new(
                        format!("{s}/{set}-{kind}"),
                        data.sets[set].select(&choice.kept_columns),
                        learner(*kind),
                    ));
                }
            }
            let y = &specs[0].data.y;
            let seed = stage_seed(root, &s.to_string());
            let plan = bootstrap_plan(y.len(), ev.repetitions, seed, Some(y))?;
            let t = run_experiment(&specs, &plan)?;
            table.rows.extend(t.rows);
            if ev.permutation_control {
                let mut control = specs[0].clone();
                control.name = format!("{s}/{PERMUTED}-{}", ev.models[0]);
                let t = permutation_control(&control, ev.repetitions, stage_seed(seed, PERMUTED))?;
                table.rows.extend(t.rows);
            }
        }
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        self.write(rec, "aucs.csv", &buf)
    }

    /// Configured or default `model:baseline` pairs, expanded per setting.
    fn comparison_pairs(&self, table: &AucTable) -> Vec<(String, String)> {
        let models = table.models();
        let mut groups: Vec<&str> = models.iter().map(|m| group_of(m)).collect();
        groups.dedup();
        let first = self.cfg.evaluation.models[0];
        let short: Vec<(String, String)> = if self.cfg.evaluation.compare.is_empty() {
            vec![
                (format!("{COMBINED}-{first}"), format!("{BAOLTC}-{first}")),
                (format!("{KULTC}-{first}"), format!("{BAOLTC}-{first}")),
                (format!("{KULTC}-{first}"), format!("{PERMUTED}-{first}")),
            ]
        } else {
            self.cfg
                .evaluation
                .compare
                .iter()
                .filter_map(|p| p.split_once(':'))
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect()
        };
        let mut out = Vec::new();
        for g in groups {
            for (a, b) in &short {
                let (a, b) = (format!("{g}/{a}"), format!("{g}/{b}"));
                if models.contains(&a) && models.contains(&b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn compare(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let table = AucTable::read_csv(&self.read(rec, "aucs.csv")?[..])?;
        let pairs = self.comparison_pairs(&table);
        if pairs.is_empty() {
            rec.warnings.push("no model:baseline pair has AUCs on both sides".into());
        }
        let stats = compare_aucs(&table, &pairs, &self.cfg.ranking)?;
        self.write(rec, "stats.json", &to_json(&stats))
    }

    fn explain(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let m = self.labeled_matrix(rec)?;
        let selection = self.selection(rec)?;
        let kind = self.cfg.explain.model;
        let seed = stage_seed(self.cfg.seed, "explain");
        rec.seed = Some(seed);
        for (s, sel) in &selection.settings {
            let data = self.kultc_data(&m, sel, *s)?;
            let name = format!("{KULTC}-{kind}");
            let saved_path = format!("models/{s}/{name}.json");
            let model = if self.dir.join(&saved_path).exists() {
                let saved: SavedModel = serde_json::from_slice(&self.read(rec, &saved_path)?)?;
                if saved.columns != data.columns {
                    bail!("{saved_path} was trained on other columns; rerun train");
                }
                saved.model
            } else {
                let params = self.params(kind, &data, seed)?;
                train(&params, &data, seed)?
            };
            let (shap, importance) = explain_model(&model, &data, seed, &self.cfg.ranking)?;
            let mut buf = Vec::new();
            shap.write_csv(&mut buf)?;
            self.write(rec, &format!("explain/{s}/shap.csv"), &buf)?;
            let file = ImportanceFile {
                version: OUTPUT_VERSION,
                setting: *s,
                model: name,
                output_space: shap.space,
                base_value: shap.base_value,
                records: shap.values.len(),
                ranks: importance.ranks,
            };
            self.write(rec, &format!("explain/{s}/importance.json"), &to_json(&file))?;
        }
        Ok(())
    }

    fn report(&mut self, rec: &mut StageRecord) -> anyhow::Result<()> {
        let table = AucTable::read_csv(&self.read(rec, "aucs.csv")?[..])?;
        let stats: StatsFile = serde_json::from_slice(&self.read(rec, "stats.json")?)?;
        let mut importance = BTreeMap::new();
        if self.cfg.explain.enabled {
            for s in self.cfg.settings() {
                let rel = format!("explain/{s}/importance.json");
                if self.dir.join(&rel).exists() {
                    let f: ImportanceFile = serde_json::from_slice(&self.read(rec, &rel)?)?;
                    importance.insert(s.to_string(), f.ranks);
                }
            }
        }
        let r = report::build_report(&table, &stats, (!importance.is_empty()).then_some(importance));
        self.write(rec, "report.md", r.markdown().as_bytes())?;
        self.write(rec, "report.json", &to_json(&r))
    }
}

/// KU vectors of every Java file under `path` (a file or a directory).
pub fn detect_tree(path: &Path, detector: &Detector) -> anyhow::Result<Vec<(String, KuVector)>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![path.to_path_buf()];
    while let Some(p) = stack.pop() {
        if p.is_dir() {
            for e in std::fs::read_dir(&p)? {
                stack.push(e?.path());
            }
        } else if p.extension().is_some_and(|x| x == "java") {
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            files.insert(p.to_string_lossy().replace('\\', "/"), text);
        } else if p == path {
            bail!("{} is not a Java file", p.display());
        }
    }
    if !path.exists() {
        bail!("{} does not exist", path.display());
    }
    let index = detector.index(&files);
    Ok(files
        .iter()
        .map(|(p, t)| (p.clone(), detector.detect_file(p, t, &index)))
        .collect())
}
