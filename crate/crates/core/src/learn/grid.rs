use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::Criterion;
use super::{auc, rng_for, train, Dataset, LearnError, ModelKind, Params};

pub const DEFAULT_FOLDS: usize = 10;

/// Candidate hyper-parameter values for one classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: ModelKind,
    pub points: Vec<Params>,
    pub folds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: Params,
    pub cv_score: f64,
    /// Score of every point, in grid order.
    pub scores: Vec<f64>,
}

const ESTIMATORS: [usize; 4] = [10, 50, 100, 200];
const DEPTHS: [Option<usize>; 3] = [None, Some(5), Some(10)];
const RATES: [f64; 3] = [0.1, 0.01, 0.001];

impl GridSpec {
    pub fn new(kind: ModelKind, points: Vec<Params>) -> Self {
        Self {
            kind,
            points,
            folds: DEFAULT_FOLDS,
        }
    }

    /// The studied candidate values; the last parameter varies fastest.
    pub fn standard(kind: ModelKind) -> Self {
        let mut points = Vec::new();
        match kind {
            ModelKind::Knn => {
                for n_neighbors in [1, 5, 9, 13, 17, 20] {
                    points.push(Params::Knn { n_neighbors });
                }
            }
            ModelKind::Nb => {
                for var_smoothing in [1e-5, 1e-9, 1e-11, 1e-15] {
                    points.push(Params::Nb { var_smoothing });
                }
            }
            ModelKind::Dt => {
                for criterion in [Criterion::Gini, Criterion::Entropy, Criterion::LogLoss] {
                    for max_depth in DEPTHS {
                        for ccp_alpha in [0.0001, 0.001, 0.01, 0.1, 0.5] {
                            points.push(Params::Dt {
                                criterion,
                                max_depth,
                                ccp_alpha,
                            });
                        }
                    }
                }
            }
            ModelKind::Rf => {
                for n_estimators in ESTIMATORS {
                    for max_depth in DEPTHS {
                        points.push(Params::Rf {
                            n_estimators,
                            max_depth,
                        });
                    }
                }
            }
            ModelKind::Xgb => {
                for n_estimators in ESTIMATORS {
                    for max_depth in DEPTHS {
                        for learning_rate in RATES {
                            points.push(Params::Xgb {
                                n_estimators,
                                max_depth,
                                learning_rate,
                            });
                        }
                    }
                }
            }
            ModelKind::Lgbm => {
                for n_estimators in ESTIMATORS {
                    for num_leaves in DEPTHS {
                        for learning_rate in RATES {
                            points.push(Params::Lgbm {
                                n_estimators,
                                num_leaves,
                                learning_rate,
                            });
                        }
                    }
                }
            }
        }
        Self::new(kind, points)
    }
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
pub fn stratified_folds(y: &[bool], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = rng_for(seed, 0);
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            out[next % folds].push(i);
            next += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    out
}

fn cv_score(params: &Params, data: &Dataset, folds: &[Vec<usize>], seed: u64) -> Result<f64, LearnError> {
    let mut per_fold = Vec::new();
    let mut pooled_scores = Vec::new();
    let mut pooled_labels = Vec::new();
    for (k, test) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        let model = train(params, &data.rows(&train_idx), seed)?;
        let test_data = data.rows(test);
        let scores = model.predict_batch(&test_data.x);
        if test_data.has_both_classes() {
            per_fold.push(auc(&scores, &test_data.y)?);
        }
        pooled_scores.extend(scores);
        pooled_labels.extend(test_data.y);
    }
    if per_fold.is_empty() {
        auc(&pooled_scores, &pooled_labels)
    } else {
        Ok(per_fold.iter().sum::<f64>() / per_fold.len() as f64)
    }
}

/// Exhaustive search scored by stratified k-fold AUC; ties go to the
/// earliest grid point.
pub fn grid_search(spec: &GridSpec, data: &Dataset, seed: u64) -> Result<GridResult, LearnError> {
    if spec.points.is_empty() {
        return Err(LearnError::InvalidParams("empty grid".into()));
    }
    let minority = data.positives().min(data.n() - data.positives());
    if data.n() < spec.folds || minority < 2 || spec.folds < 2 {
        return Err(LearnError::TooFewSamples {
            n: data.n(),
            needed: spec.folds.max(2),
        });
    }
    let folds = stratified_folds(&data.y, spec.folds, seed);
    let scores = spec
        .points
        .par_iter()
        .map(|p| cv_score(p, data, &folds, seed))
        .collect::<Result<Vec<f64>, _>>()?;
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok(GridResult {
        best: spec.points[best].clone(),
        cv_score: scores[best],
        scores,
    })
}
