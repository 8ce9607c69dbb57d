use kultc::learn::{
    auc, autospearman, bootstrap_plan, run_experiment, train, Dataset, DropReason, Learner, ModelKind, ModelSpec,
    Params,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
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
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// 1 / (1 - R²) from an ordinary least-squares fit of column `j` on the rest.
fn oracle_vif(cols: &[Vec<f64>], j: usize) -> f64 {
    let n = cols[j].len();
    let others: Vec<&Vec<f64>> = cols.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, c)| c).collect();
    let a = DMatrix::from_fn(n, others.len() + 1, |r, c| if c == 0 { 1.0 } else { others[c - 1][r] });
    let y = DVector::from_column_slice(&cols[j]);
    let beta = a.clone().svd(true, true).solve(&y, 1e-12).unwrap();
    let resid = &y - &a * beta;
    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r2 = 1.0 - resid.norm_squared() / tss;
    1.0 / (1.0 - r2)
}

fn random_dataset(n: usize, p: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n).map(|_| (0..p).map(|_| rng.gen::<f64>()).collect()).collect();
    let y = (0..n).map(|i| i % 2 == 0).collect();
    Dataset::new((0..p).map(|j| format!("c{j}")).collect(), x, y)
}

#[test]
fn auc_worked_example() {
    assert_eq!(auc(&[0.9, 0.4, 0.5, 0.1], &[true, true, false, false]).unwrap(), 0.75);
    assert_eq!(auc(&[0.3; 6], &[true, false, true, false, false, true]).unwrap(), 0.5);
    assert_eq!(auc(&[0.9, 0.8, 0.1], &[true, true, false]).unwrap(), 1.0);
}

proptest! {
    #[test]
    fn auc_matches_pairwise_count(
        pts in proptest::collection::vec((0u8..20, any::<bool>()), 2..60)
    ) {
        let scores: Vec<f64> = pts.iter().map(|p| p.0 as f64 / 7.0).collect();
        let labels: Vec<bool> = pts.iter().map(|p| p.1).collect();
        prop_assume!(labels.iter().any(|l| *l) && labels.iter().any(|l| !*l));
        let got = auc(&scores, &labels).unwrap();
        prop_assert!((got - pairwise_auc(&scores, &labels)).abs() < 1e-12);
        let squashed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() + 2.0).collect();
        prop_assert!((auc(&squashed, &labels).unwrap() - got).abs() < 1e-12);
    }

    #[test]
    fn autospearman_output_passes_independent_checks(seed in any::<u64>(), p in 3usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 40;
        let base: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen_range(0..6) as f64).collect()).collect();
        let mut cols = base.clone();
        cols.push(base[0].iter().zip(&base[1]).map(|(a, b)| a + 0.3 * b).collect());
        cols.push(base[2].iter().map(|v| -v).collect());
        let names: Vec<String> = (0..cols.len()).map(|j| format!("f{j}")).collect();
        let x = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        let d = Dataset::new(names.clone(), x, vec![false; n]);
        let r = autospearman(&d, 0.7, 5.0);

        let mut all: Vec<String> = r.kept_columns.iter().cloned().chain(r.dropped.iter().map(|d| d.0.clone())).collect();
        all.sort();
        let mut expected = names.clone();
        expected.sort();
        prop_assert_eq!(all, expected);

        let kept: Vec<Vec<f64>> = r.kept_columns.iter().map(|c| d.column(names.iter().position(|n| n == c).unwrap())).collect();
        for a in 0..kept.len() {
            for b in a + 1..kept.len() {
                prop_assert!(oracle_spearman(&kept[a], &kept[b]).abs() < 0.7);
            }
        }
        if kept.len() > 1 {
            for j in 0..kept.len() {
                prop_assert!(oracle_vif(&kept, j) < 5.0);
            }
        }
        prop_assert_eq!(autospearman(&d, 0.7, 5.0), r);
    }
}

#[test]
fn exact_linear_combination_is_removed_by_vif() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 200;
    let mut cols: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
    cols.push((0..n).map(|i| cols.iter().map(|c| c[i]).sum()).collect());
    for j in 0..4 {
        assert!(oracle_spearman(&cols[j], &cols[4]).abs() < 0.7);
    }
    assert!(oracle_vif(&cols, 4) > 1e6);
    let rows = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let names: Vec<String> = ["a", "b", "c", "d", "z"].iter().map(|s| s.to_string()).collect();
    let d = Dataset::new(names, rows, vec![false; n]);
    let r = autospearman(&d, 0.7, 5.0);
    assert_eq!(r.kept_columns, vec!["a", "b", "c", "d"]);
    assert_eq!(r.dropped, vec![("z".to_string(), DropReason::HighVif)]);
}

#[test]
fn independent_columns_are_all_kept() {
    let d = random_dataset(300, 6, 3);
    for a in 0..6 {
        for b in a + 1..6 {
            assert!(oracle_spearman(&d.column(a), &d.column(b)).abs() < 0.7);
        }
    }
    let r = autospearman(&d, 0.7, 5.0);
    assert_eq!(r.kept_columns, d.columns);
    assert!(r.dropped.is_empty());
}

#[test]
fn out_of_sample_share_approaches_one_over_e() {
    let plan = bootstrap_plan(1000, 100, 21, None).unwrap();
    assert_eq!(plan.splits.len(), 100);
    let mut total = 0.0;
    for s in &plan.splits {
        assert_eq!(s.in_sample.len(), 1000);
        assert!(s.out_of_sample.iter().all(|i| !s.in_sample.contains(i)));
        total += s.out_of_sample.len() as f64 / 1000.0;
    }
    let mean = total / 100.0;
    assert!((mean - (-1.0f64).exp()).abs() < 0.02, "{mean}");
}

#[test]
fn knn_with_every_neighbour_predicts_the_prior() {
    let d = random_dataset(20, 2, 9);
    let m = train(&Params::Knn { n_neighbors: 20 }, &d, 0).unwrap();
    for row in &d.x {
        assert_eq!(m.predict_proba(row), 0.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn forest_probabilities_are_tree_means(seed in any::<u64>()) {
        let d = random_dataset(40, 3, seed);
        let m = train(&Params::Rf { n_estimators: 15, max_depth: None }, &d, seed).unwrap();
        let trees = m.trees().unwrap();
        for row in &d.x {
            let p = m.predict_proba(row);
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert_eq!(p, trees.iter().map(|t| t.predict(row)).sum::<f64>() / trees.len() as f64);
        }
    }
}

fn signal_and_noise(n: usize, seed: u64) -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<bool> = (0..n).map(|i| i % 3 == 0).collect();
    let signal = y
        .iter()
        .map(|&l| vec![if l { 1.0 } else { 0.0 } + rng.gen::<f64>() * 0.8, rng.gen()])
        .collect();
    let noise = (0..n).map(|_| vec![rng.gen(), rng.gen()]).collect();
    let cols = vec!["a".to_string(), "b".to_string()];
    (Dataset::new(cols.clone(), signal, y.clone()), Dataset::new(cols, noise, y))
}

#[test]
fn separable_features_beat_noise() {
    let (signal, noise) = signal_and_noise(120, 4);
    let plan = bootstrap_plan(120, 20, 5, Some(&signal.y)).unwrap();
    let rf = Learner::Fixed(ModelKind::Rf.default_params());
    let t = run_experiment(
        &[ModelSpec::new("signal", signal, rf.clone()), ModelSpec::new("noise", noise, rf)],
        &plan,
    )
    .unwrap();
    assert!(t.median("signal").unwrap() > t.median("noise").unwrap());
    assert!(t.median("signal").unwrap() > 0.95);
}

#[test]
fn random_labels_give_chance_auc() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let d = random_dataset(200, 4, 8);
    let y: Vec<bool> = (0..200).map(|_| rng.gen_bool(0.4)).collect();
    let d = d.with_labels(y);
    let plan = bootstrap_plan(200, 100, 13, Some(&d.y)).unwrap();
    let t = run_experiment(&[ModelSpec::new("rf", d, Learner::Fixed(ModelKind::Rf.default_params()))], &plan).unwrap();
    let a = t.aucs("rf");
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    assert!((mean - 0.5).abs() < 0.05, "{mean}");
}

#[test]
fn evaluation_order_does_not_change_results() {
    let (signal, noise) = signal_and_noise(80, 1);
    let plan = bootstrap_plan(80, 8, 2, Some(&signal.y)).unwrap();
    let specs = vec![
        ModelSpec::new("nb", signal.clone(), Learner::Fixed(ModelKind::Nb.default_params())),
        ModelSpec::new("dt", noise, Learner::Fixed(ModelKind::Dt.default_params())),
        ModelSpec::new("rf", signal, Learner::Fixed(ModelKind::Rf.default_params())),
    ];
    let forward = run_experiment(&specs, &plan).unwrap();
    let reversed: Vec<ModelSpec> = specs.into_iter().rev().collect();
    let backward = run_experiment(&reversed, &plan).unwrap();
    for m in ["nb", "dt", "rf"] {
        assert_eq!(forward.aucs(m), backward.aucs(m));
    }
}
