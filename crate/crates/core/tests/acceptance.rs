use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use chrono::DateTime;
use kultc::analysis::{cliffs_delta, explain, normalized_auc_improvement, tree_shap, wilcoxon_signed_rank};
use kultc::features::FeatureMatrix;
use kultc::ku::{detect_kus, parse_named, KuVector, Ruleset, SymbolIndex};
use kultc::labeling::{label_author, nearest_rank, Setting};
use kultc::learn::{auc, autospearman, bootstrap_plan, train, Dataset, Params};
use kultc::mining::CommitRecord;
use kultc::pipeline::{run_pipeline, synth_corpus, RunConfig, SynthParams};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ku")
}

fn fixture(name: &str) -> (String, KuVector) {
    let path = fixture_dir().join(format!("{name}.java"));
    let src = std::fs::read_to_string(&path).unwrap();
    let exp = std::fs::read_to_string(path.with_extension("expected")).unwrap();
    let sparse: String = exp.lines().filter(|l| !l.starts_with('#')).collect();
    (src, KuVector::from_sparse(&sparse).unwrap())
}

fn detect(name: &str, src: &str) -> KuVector {
    let facts = parse_named(name, src).unwrap();
    let index = SymbolIndex::from_streams([&facts]);
    detect_kus(&facts, &index, Ruleset::builtin())
}

fn ku_corpus() -> Outcome {
    let start = Instant::now();
    let mut names: Vec<String> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "java"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let mut covered = KuVector::default();
    for name in &names {
        let (src, expected) = fixture(name);
        let got = detect(name, &src);
        ensure!(got == expected, "{name}: expected {} got {}", expected.to_sparse(), got.to_sparse());
        covered += got;
    }
    ensure!(names.len() >= 28, "only {} fixtures", names.len());
    ensure!(covered.counts.iter().all(|c| *c > 0), "some KU has no fixture");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!("{} fixtures matched in {:.2}s", names.len(), took.as_secs_f64()))
}

fn third_party() -> Outcome {
    let (ps, pe) = fixture("X01_platform_pair");
    let (ts, te) = fixture("X02_thirdparty_pair");
    let (p, t) = (detect("X01_platform_pair", &ps), detect("X02_thirdparty_pair", &ts));
    ensure!(p == pe && t == te, "platform {} third-party {}", p.to_sparse(), t.to_sparse());
    let k16 = 15;
    ensure!(p.counts[k16] > 0 && t.counts[k16] == 0, "K16 {} vs {}", p.counts[k16], t.counts[k16]);
    Ok(format!("K16 {} vs {}", p.counts[k16], t.counts[k16]))
}

fn worked_example() -> Outcome {
    let v = normalized_auc_improvement(0.81, 0.75).map_err(|e| e.to_string())?;
    ensure!((v - 24.0).abs() < 1e-9, "got {v}");
    Ok(format!("{v:.6} %"))
}

fn brute_cliff(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0i64;
    for x in a {
        for y in b {
            s += (x > y) as i64 - (x < y) as i64;
        }
    }
    s as f64 / (a.len() * b.len()) as f64
}

fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1.0;
                wins += if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    wins / pairs
}

fn statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..1000 {
        let a: Vec<f64> = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(0..8) as f64).collect();
        let b: Vec<f64> = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(0..8) as f64).collect();
        let d = cliffs_delta(&a, &b).map_err(|e| e.to_string())?.d;
        ensure!(d == brute_cliff(&a, &b), "cliff case {i}: {d}");
    }
    let a = [0.8, 0.7, 0.9, 0.6, 0.85, 0.75];
    let b = [0.7, 0.5, 0.6, 0.2, 0.45, 0.3];
    let p = wilcoxon_signed_rank(&a, &b).map_err(|e| e.to_string())?;
    ensure!(p == 0.03125, "wilcoxon p {p}");
    for i in 0..1000 {
        let n = rng.gen_range(2..40);
        let mut labels: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        labels[0] = true;
        labels[1] = false;
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..10) as f64 / 10.0).collect();
        let got = auc(&scores, &labels).map_err(|e| e.to_string())?;
        ensure!((got - pairwise_auc(&scores, &labels)).abs() < 1e-12, "auc case {i}");
    }
    Ok("1000 Cliff's delta cases, Wilcoxon p = 0.03125, 1000 AUC cases".into())
}

struct SynthRun {
    _corpus: tempfile::TempDir,
    run: PathBuf,
    elapsed: Duration,
}

fn synth_run() -> &'static SynthRun {
    static RUN: OnceLock<SynthRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let start = Instant::now();
        synth_corpus(&SynthParams::new(7, 4, 200, 0.3), dir.path()).unwrap();
        let cfg = RunConfig::load(&dir.path().join("kultc.toml")).unwrap();
        run_pipeline(&cfg, None).unwrap();
        SynthRun {
            run: cfg.output_path(),
            elapsed: start.elapsed(),
            _corpus: dir,
        }
    })
}

fn labelled_matrix(run: &Path) -> FeatureMatrix {
    let mut m = FeatureMatrix::read_csv(std::fs::File::open(run.join("matrix.csv")).unwrap()).unwrap();
    let mut labels: BTreeMap<(String, String), BTreeMap<Setting, bool>> = BTreeMap::new();
    let mut r = csv::Reader::from_path(run.join("labels.csv")).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let s: Setting = rec[2].parse().unwrap();
        labels.entry((rec[0].into(), rec[1].into())).or_default().insert(s, &rec[3] == "true");
    }
    for row in &mut m.rows {
        row.labels = labels[&(row.key.project_id.clone(), row.key.developer.clone())].clone();
    }
    m
}

fn shap_accuracy() -> Outcome {
    let m = labelled_matrix(&synth_run().run);
    let mut d: Dataset = m.dataset(Setting::Ltc1);
    for r in &mut d.x {
        r.push(0.0);
    }
    d.columns.push("planted_unused".into());
    let never = d.p() - 1;
    let model = train(&Params::Rf { n_estimators: 100, max_depth: None }, &d, 3).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for row in &d.x {
        let (phi, base) = tree_shap(&model, row).map_err(|e| e.to_string())?;
        worst = worst.max((base + phi.iter().sum::<f64>() - model.predict_proba(row)).abs());
        ensure!(phi[never] == 0.0, "unused feature got {}", phi[never]);
    }
    ensure!(worst < 1e-9, "local accuracy error {worst:e}");
    let s = explain(&model, &d, &d, 0).map_err(|e| e.to_string())?;
    ensure!(s.values.iter().all(|r| r[never] == 0.0), "explain gave the unused feature weight");
    Ok(format!("{} records, max error {worst:.1e}", d.n()))
}

fn signal_recovery() -> Outcome {
    let run = synth_run();
    let mut aucs: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut r = csv::Reader::from_path(run.run.join("aucs.csv")).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        aucs.entry(rec[0].to_string()).or_default().push(rec[2].parse().unwrap());
    }
    let full = aucs.get_mut("LTC-1/kultc-rf").ok_or("no LTC-1/kultc-rf")?;
    full.sort_by(f64::total_cmp);
    let median = (full[(full.len() - 1) / 2] + full[full.len() / 2]) / 2.0;
    let permuted = &aucs["LTC-1/permuted-rf"];
    let mean = permuted.iter().sum::<f64>() / permuted.len() as f64;
    let imp: serde_json::Value =
        serde_json::from_slice(&std::fs::read(run.run.join("explain/LTC-1/importance.json")).unwrap()).unwrap();
    let top: Vec<&str> = imp["ranks"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["rank"] == 1)
        .map(|e| e["treatment"].as_str().unwrap())
        .collect();
    ensure!(median >= 0.9, "median AUC {median:.4}");
    ensure!((mean - 0.5).abs() <= 0.05, "permuted mean {mean:.4}");
    ensure!(top == ["DEV_EXP"], "rank 1 dimensions {top:?}");
    ensure!(run.elapsed < Duration::from_secs(300), "took {:?}", run.elapsed);
    Ok(format!(
        "median AUC {median:.4}, permuted mean {mean:.4}, DEV_EXP rank 1, {:.1}s",
        run.elapsed.as_secs_f64()
    ))
}

fn naive_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let below = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn oracle_spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (naive_ranks(a), naive_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn oracle_vif(cols: &[Vec<f64>], j: usize) -> f64 {
    let n = cols[j].len();
    let others: Vec<&Vec<f64>> = cols.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, c)| c).collect();
    let a = DMatrix::from_fn(n, others.len() + 1, |r, c| if c == 0 { 1.0 } else { others[c - 1][r] });
    let y = DVector::from_column_slice(&cols[j]);
    let beta = a.clone().svd(true, true).solve(&y, 1e-12).unwrap();
    let resid = &y - &a * beta;
    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    1.0 / (resid.norm_squared() / tss)
}

fn autospearman_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 200;
    let mut cols: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
    cols.push(cols[0].iter().map(|v| 3.0 * v + 1.0).collect());
    cols.push(cols[1].iter().map(|v| -v).collect());
    cols.push((0..n).map(|i| cols[0][i] + cols[1][i] + cols[2][i] + cols[3][i]).collect());
    let names: Vec<String> = ["a", "b", "c", "d", "a_dup", "b_neg", "sum"].map(String::from).to_vec();
    let rows = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let d = Dataset::new(names.clone(), rows, vec![false; n]);
    let r = autospearman(&d, 0.7, 5.0);
    let dropped: Vec<&str> = r.dropped.iter().map(|d| d.0.as_str()).collect();
    ensure!(r.kept_columns.len() == 4, "kept {:?}", r.kept_columns);
    ensure!(dropped.contains(&"sum"), "combination kept: {:?}", r.kept_columns);
    for pair in [("a", "a_dup"), ("b", "b_neg")] {
        let both = r.kept_columns.iter().filter(|c| *c == pair.0 || *c == pair.1).count();
        ensure!(both == 1, "duplicate pair {pair:?} not reduced to one column");
    }
    let kept: Vec<Vec<f64>> =
        r.kept_columns.iter().map(|c| cols[names.iter().position(|n| n == c).unwrap()].clone()).collect();
    for a in 0..kept.len() {
        for b in a + 1..kept.len() {
            let rho = oracle_spearman(&kept[a], &kept[b]);
            ensure!(rho.abs() < 0.7, "kept pair with rho {rho}");
        }
        let v = oracle_vif(&kept, a);
        ensure!(v < 5.0, "kept column with VIF {v}");
    }
    Ok(format!("kept {:?}", r.kept_columns))
}

fn bootstrap_contract() -> Outcome {
    let plan = bootstrap_plan(1000, 100, 8, None).map_err(|e| e.to_string())?;
    ensure!(plan.splits.len() == 100, "{} splits", plan.splits.len());
    let mut total = 0.0;
    for (i, s) in plan.splits.iter().enumerate() {
        let mut distinct = s.in_sample.clone();
        distinct.sort_unstable();
        distinct.dedup();
        ensure!(s.out_of_sample.iter().all(|o| distinct.binary_search(o).is_err()), "split {i} overlaps");
        ensure!(distinct.len() + s.out_of_sample.len() == 1000, "split {i} loses rows");
        total += s.out_of_sample.len() as f64 / 1000.0;
    }
    let mean = total / 100.0;
    ensure!((mean - 0.368).abs() <= 0.02, "out-of-sample share {mean}");
    Ok(format!("out-of-sample share {mean:.4}"))
}

fn commit(author: &str, secs: i64, i: usize) -> CommitRecord {
    CommitRecord {
        id: format!("{author}-{i}"),
        author_name: author.into(),
        author_time: DateTime::from_timestamp(secs, 0).unwrap(),
        message: String::new(),
        changed_paths: vec![],
    }
}

fn labeler() -> Outcome {
    let threshold = nearest_rank(&(1..=11).collect::<Vec<u64>>(), 10.0);
    ensure!(threshold == 2, "threshold {threshold}");
    let day = 86_400;
    let scenario = |subject: usize| {
        let mut c = Vec::new();
        for k in 1..=11usize {
            c.extend((0..k).map(|i| commit(&format!("o{k}"), (i as i64 + 1) * day, i)));
        }
        c.extend((0..subject).map(|i| commit("dev", (i as i64) * 100 * day, i)));
        c.push(commit("dev", 400 * day, 99));
        label_author("dev", DateTime::from_timestamp(0, 0).unwrap(), &c, Setting::Ltc1)
    };
    let (pass, fail) = (scenario(3), scenario(2));
    ensure!(pass.yearly_counts[0].dev_commits == 3 && pass.is_ltc, "{pass:?}");
    ensure!(fail.yearly_counts[0].threshold_commits == 2 && !fail.is_ltc, "{fail:?}");

    let mut by_pair: BTreeMap<(String, String), [bool; 3]> = BTreeMap::new();
    let mut r = csv::Reader::from_path(synth_run().run.join("labels.csv")).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let s: Setting = rec[2].parse().unwrap();
        by_pair.entry((rec[0].into(), rec[1].into())).or_default()[s.years() as usize - 1] = &rec[3] == "true";
    }
    for (k, l) in &by_pair {
        ensure!((!l[1] || l[0]) && (!l[2] || l[1]), "{k:?} labels {l:?}");
    }
    let counts: Vec<usize> = (0..3).map(|i| by_pair.values().filter(|l| l[i]).count()).collect();
    Ok(format!("threshold 2; LTC counts {counts:?} over {} pairs", by_pair.len()))
}

fn outputs(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(p) = stack.pop() {
        if p.is_dir() {
            stack.extend(std::fs::read_dir(&p).unwrap().map(|e| e.unwrap().path()));
        } else if p.extension().is_some_and(|e| e == "csv" || e == "json") {
            out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
        }
    }
    out
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(&SynthParams::new(21, 2, 60, 0.3), dir.path()).unwrap();
    let mut cfg = RunConfig::load(&dir.path().join("kultc.toml")).unwrap();
    cfg.evaluation.repetitions = 20;
    let (a, b) = (dir.path().join("first"), dir.path().join("second"));
    run_pipeline(&cfg, Some(&a)).map_err(|e| e.to_string())?;
    run_pipeline(&cfg, Some(&b)).map_err(|e| e.to_string())?;
    let (oa, ob) = (outputs(&a), outputs(&b));
    ensure!(oa.len() > 10, "only {} outputs", oa.len());
    ensure!(oa.keys().eq(ob.keys()), "different file sets");
    for (k, v) in &oa {
        ensure!(ob[k] == *v, "{} differs", k.display());
    }
    Ok(format!("{} CSV/JSON files identical", oa.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("KU corpus", ku_corpus),
        ("third-party exclusion", third_party),
        ("normalized improvement worked example", worked_example),
        ("statistics oracles", statistics),
        ("SHAP local accuracy and missingness", shap_accuracy),
        ("pipeline signal recovery", signal_recovery),
        ("AutoSpearman contract", autospearman_contract),
        ("bootstrap contract", bootstrap_contract),
        ("LTC labeler", labeler),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                println!("FAIL criterion {}: {name} ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
