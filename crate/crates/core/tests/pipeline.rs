use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kultc::features::{Dimension, FeatureMatrix};
use kultc::labeling::Setting;
use kultc::pipeline::{
    run_pipeline, stage_seed, synth_corpus, ConfigError, PipelineError, Report, Run, RunConfig, RunManifest, Stage,
    SynthParams,
};

fn corpus(dir: &Path, seed: u64, projects: usize, devs: usize, fraction: f64) -> kultc::pipeline::SynthSummary {
    synth_corpus(&SynthParams::new(seed, projects, devs, fraction), dir).unwrap()
}

fn config(dir: &Path, extra: &str) -> RunConfig {
    let text = format!("seed = 5\n\n[input]\ncorpus = \".\"\n\n[evaluation]\nrepetitions = 8\n{extra}");
    RunConfig::from_toml(&text, dir).unwrap()
}

fn files_under(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(p) = stack.pop() {
        if p.is_dir() {
            stack.extend(std::fs::read_dir(&p).unwrap().map(|e| e.unwrap().path()));
        } else {
            let rel = p.strip_prefix(dir).unwrap().to_string_lossy().replace('\\', "/");
            out.insert(rel, std::fs::read(&p).unwrap());
        }
    }
    out
}

fn labels(run: &Path) -> BTreeMap<(String, String, String), bool> {
    let mut r = csv::Reader::from_path(run.join("labels.csv")).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            ((rec[0].to_string(), rec[1].to_string(), rec[2].to_string()), &rec[3] == "true")
        })
        .collect()
}

#[test]
fn same_seed_gives_the_same_corpus() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    corpus(a.path(), 11, 2, 12, 0.4);
    corpus(b.path(), 11, 2, 12, 0.4);
    assert_eq!(files_under(a.path()), files_under(b.path()));
}

#[test]
fn planted_labels_are_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let summary = corpus(dir.path(), 3, 2, 40, 0.5);
    assert_eq!(summary.planted_ltcs(), 20);
    let cfg = config(dir.path(), "");
    let mut run = Run::create(&cfg, None).unwrap();
    run.execute(Stage::Label).unwrap();
    let got = labels(run.dir());
    assert_eq!(got.len(), 40 * 3);
    let ltc1 = got.iter().filter(|((_, _, s), v)| s == "LTC-1" && **v).count();
    assert_eq!(ltc1, 20);
    for d in &summary.devs {
        for s in Setting::ALL {
            let key = (d.project_id.clone(), d.username.clone(), s.to_string());
            assert_eq!(got[&key], d.expected(s), "{key:?}");
        }
    }
}

#[test]
fn single_developer_is_labelable() {
    let dir = tempfile::tempdir().unwrap();
    corpus(dir.path(), 1, 1, 1, 0.5);
    let cfg = config(dir.path(), "");
    let mut run = Run::create(&cfg, None).unwrap();
    run.execute(Stage::Mine).unwrap();
    run.execute(Stage::Label).unwrap();
    assert_eq!(labels(run.dir()).len(), 3);
    let pairs = std::fs::read_to_string(run.dir().join("pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 2);
}

#[test]
fn missing_repository_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[input]\nrepos = [\"gone.json\"]\nprofiles = \"p.json\"\n";
    let cfg = RunConfig::from_toml(text, dir.path()).unwrap();
    match run_pipeline(&cfg, None) {
        Err(e @ PipelineError::Config(ConfigError::MissingPath(_))) => {
            assert!(e.to_string().contains("gone.json"));
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn stage_without_inputs_reports_what_is_missing() {
    let dir = tempfile::tempdir().unwrap();
    corpus(dir.path(), 1, 1, 4, 0.5);
    let cfg = config(dir.path(), "");
    let mut run = Run::create(&cfg, None).unwrap();
    match run.execute(Stage::Select) {
        Err(e @ PipelineError::MissingStageOutput(_)) => {
            assert!(e.to_string().contains("matrix.csv"));
            assert_eq!(e.exit_code(), 1);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_pull_requests_downgrade_to_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    corpus(dir.path(), 2, 2, 16, 0.5);
    std::fs::remove_file(dir.path().join("prs/proj-01.json")).unwrap();
    let cfg = config(dir.path(), "");
    let mut run = Run::create(&cfg, None).unwrap();
    run.execute(Stage::Mine).unwrap();
    run.execute(Stage::Features).unwrap();
    let w = &run.manifest().warnings;
    assert!(w.iter().any(|w| w.starts_with("mine: ") && w.contains("proj-01")), "{w:?}");
    let m = FeatureMatrix::read_csv(std::fs::File::open(run.dir().join("matrix.csv")).unwrap()).unwrap();
    let collab = &m.dimension_map[&Dimension::CollabExp];
    let zero = |p: &str| {
        m.rows
            .iter()
            .filter(|r| r.key.project_id == p)
            .all(|r| collab.iter().all(|&j| r.values[j] == 0.0))
    };
    assert!(zero("proj-01"));
    assert!(!zero("proj-00"));
}

#[test]
fn full_run_reports_every_model_and_records_every_output() {
    let dir = tempfile::tempdir().unwrap();
    corpus(dir.path(), 4, 2, 60, 0.4);
    let cfg = config(dir.path(), "models = [\"rf\", \"nb\"]\n\n[labels]\nsettings = [1]\n");
    let manifest = run_pipeline(&cfg, None).unwrap();
    let run = cfg.output_path();
    let aucs = std::fs::read_to_string(run.join("aucs.csv")).unwrap();
    let report: Report = serde_json::from_slice(&std::fs::read(run.join("report.json")).unwrap()).unwrap();
    let mut in_csv: Vec<&str> = aucs.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    in_csv.dedup();
    let reported: Vec<&str> = report.models.iter().map(|m| m.model.as_str()).collect();
    assert_eq!(reported, in_csv);
    assert!(reported.contains(&"LTC-1/kultc-nb") && reported.contains(&"LTC-1/permuted-rf"));
    assert!(report.dimension_ranks.is_some());
    let md = std::fs::read_to_string(run.join("report.md")).unwrap();
    assert!(md.contains("| LTC-1/kultc-rf |"));

    let recorded: BTreeMap<&String, &String> = manifest.stages.values().flat_map(|s| s.outputs.iter()).collect();
    for (rel, bytes) in files_under(&run) {
        if rel == "manifest.json" {
            continue;
        }
        let digest = recorded.get(&rel).unwrap_or_else(|| panic!("{rel} not in manifest"));
        assert_eq!(**digest, kultc_sha(&bytes), "{rel}");
    }
    let on_disk = RunManifest::load(&run.join("manifest.json")).unwrap();
    assert_eq!(on_disk, manifest);
    assert_eq!(on_disk.stages["evaluate"].seed, Some(stage_seed(5, "evaluate")));
}

fn kultc_sha(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn report_without_explain_says_so() {
    let dir = tempfile::tempdir().unwrap();
    corpus(dir.path(), 6, 2, 40, 0.4);
    let cfg = config(dir.path(), "\n[labels]\nsettings = [1]\n\n[explain]\nenabled = false\n");
    run_pipeline(&cfg, None).unwrap();
    let run = cfg.output_path();
    assert!(!run.join("explain").exists());
    let report: Report = serde_json::from_slice(&std::fs::read(run.join("report.json")).unwrap()).unwrap();
    assert!(report.dimension_ranks.is_none());
    assert!(report.notes.iter().any(|n| n.contains("explain")));
    let md = std::fs::read_to_string(run.join("report.md")).unwrap();
    assert!(md.contains("## Dimension importance\n\nNot available."));
}

#[test]
fn rerunning_a_stage_rewrites_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    corpus(dir.path(), 8, 2, 40, 0.4);
    let cfg = config(dir.path(), "\n[labels]\nsettings = [1]\n");
    run_pipeline(&cfg, None).unwrap();
    let run: PathBuf = cfg.output_path();
    let before = files_under(&run);
    let mut again = Run::open(&cfg, None).unwrap();
    for s in [Stage::Features, Stage::Evaluate, Stage::Explain] {
        again.execute(s).unwrap();
    }
    assert_eq!(files_under(&run), before);
}
