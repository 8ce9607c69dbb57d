use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::forest::{ForestParams, RandomForest};
use super::gbt::{Gbt, GbtParams};
use super::knn::Knn;
use super::nb::GaussianNb;
use super::tree::{fit_tree, Criterion, Tree, TreeParams};
use super::{rng_for, Dataset, LearnError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Rf,
    Dt,
    Knn,
    Nb,
    /// Boosted trees grown depth-wise.
    Xgb,
    /// Boosted trees grown leaf-wise.
    Lgbm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Knn,
        ModelKind::Nb,
        ModelKind::Dt,
        ModelKind::Rf,
        ModelKind::Xgb,
        ModelKind::Lgbm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rf => "rf",
            ModelKind::Dt => "dt",
            ModelKind::Knn => "knn",
            ModelKind::Nb => "nb",
            ModelKind::Xgb => "xgb",
            ModelKind::Lgbm => "lgbm",
        }
    }

    /// Library-default hyper-parameters.
    pub fn default_params(self) -> Params {
        match self {
            ModelKind::Rf => Params::Rf {
                n_estimators: 100,
                max_depth: None,
            },
            ModelKind::Dt => Params::Dt {
                criterion: Criterion::Gini,
                max_depth: None,
                ccp_alpha: 0.0,
            },
            ModelKind::Knn => Params::Knn { n_neighbors: 5 },
            ModelKind::Nb => Params::Nb { var_smoothing: 1e-9 },
            ModelKind::Xgb => Params::Xgb {
                n_estimators: 100,
                max_depth: Some(6),
                learning_rate: 0.3,
            },
            ModelKind::Lgbm => Params::Lgbm {
                n_estimators: 100,
                num_leaves: Some(31),
                learning_rate: 0.1,
            },
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| format!("unknown model {s:?}; expected one of rf, dt, knn, nb, xgb, lgbm"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Params {
    Rf {
        n_estimators: usize,
        max_depth: Option<usize>,
    },
    Dt {
        criterion: Criterion,
        max_depth: Option<usize>,
        ccp_alpha: f64,
    },
    Knn {
        n_neighbors: usize,
    },
    Nb {
        var_smoothing: f64,
    },
    Xgb {
        n_estimators: usize,
        max_depth: Option<usize>,
        learning_rate: f64,
    },
    Lgbm {
        n_estimators: usize,
        num_leaves: Option<usize>,
        learning_rate: f64,
    },
}

fn opt(v: Option<usize>) -> String {
    v.map_or("None".to_string(), |d| d.to_string())
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::Rf {
                n_estimators,
                max_depth,
            } => write!(f, "n_estimators={n_estimators},max_depth={}", opt(*max_depth)),
            Params::Dt {
                criterion,
                max_depth,
                ccp_alpha,
            } => write!(f, "criterion={criterion},max_depth={},ccp_alpha={ccp_alpha}", opt(*max_depth)),
            Params::Knn { n_neighbors } => write!(f, "n_neighbors={n_neighbors}"),
            Params::Nb { var_smoothing } => write!(f, "var_smoothing={var_smoothing:e}"),
            Params::Xgb {
                n_estimators,
                max_depth,
                learning_rate,
            } => write!(
                f,
                "n_estimators={n_estimators},max_depth={},learning_rate={learning_rate}",
                opt(*max_depth)
            ),
            Params::Lgbm {
                n_estimators,
                num_leaves,
                learning_rate,
            } => write!(
                f,
                "n_estimators={n_estimators},num_leaves={},learning_rate={learning_rate}",
                opt(*num_leaves)
            ),
        }
    }
}

impl Params {
    pub fn kind(&self) -> ModelKind {
        match self {
            Params::Rf { .. } => ModelKind::Rf,
            Params::Dt { .. } => ModelKind::Dt,
            Params::Knn { .. } => ModelKind::Knn,
            Params::Nb { .. } => ModelKind::Nb,
            Params::Xgb { .. } => ModelKind::Xgb,
            Params::Lgbm { .. } => ModelKind::Lgbm,
        }
    }
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Forest(RandomForest),
    Tree { tree: Tree, n_features: usize },
    Knn(Knn),
    Nb(GaussianNb),
    Gbt(Gbt),
}

impl Model {
    /// Probability of the positive class.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        match self {
            Model::Forest(f) => f.predict_proba(x),
            Model::Tree { tree, .. } => tree.predict(x),
            Model::Knn(k) => k.predict_proba(x),
            Model::Nb(nb) => nb.predict_proba(x),
            Model::Gbt(g) => g.predict_proba(x),
        }
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_proba(r)).collect()
    }

    /// Width of the rows the model was trained on.
    pub fn n_features(&self) -> usize {
        match self {
            Model::Forest(f) => f.n_features,
            Model::Tree { n_features, .. } => *n_features,
            Model::Knn(k) => k.x.first().map_or(0, Vec::len),
            Model::Nb(nb) => nb.mean[0].len(),
            Model::Gbt(g) => g.n_features,
        }
    }

    /// Decision trees making up the model, if it is tree-based.
    pub fn trees(&self) -> Option<&[Tree]> {
        match self {
            Model::Forest(f) => Some(&f.trees),
            Model::Tree { tree, .. } => Some(std::slice::from_ref(tree)),
            Model::Gbt(g) => Some(&g.trees),
            _ => None,
        }
    }
}

/// Train a classifier; deterministic for a fixed seed.
pub fn train(params: &Params, data: &Dataset, seed: u64) -> Result<Model, LearnError> {
    if data.n() == 0 {
        return Err(LearnError::TooFewSamples { n: 0, needed: 2 });
    }
    if !data.has_both_classes() {
        return Err(LearnError::SingleClassTraining);
    }
    let (x, y) = (&data.x, &data.y);
    Ok(match params {
        Params::Rf {
            n_estimators,
            max_depth,
        } => {
            if *n_estimators == 0 {
                return Err(LearnError::InvalidParams("n_estimators must be positive".into()));
            }
            let p = ForestParams {
                n_estimators: *n_estimators,
                max_depth: *max_depth,
                ..ForestParams::default()
            };
            Model::Forest(RandomForest::fit(x, y, &p, seed))
        }
        Params::Dt {
            criterion,
            max_depth,
            ccp_alpha,
        } => {
            let p = TreeParams {
                criterion: *criterion,
                max_depth: *max_depth,
                ccp_alpha: *ccp_alpha,
                ..TreeParams::default()
            };
            let w = vec![1.0; data.n()];
            Model::Tree {
                tree: fit_tree(x, y, &w, &p, &mut rng_for(seed, 0)),
                n_features: data.p(),
            }
        }
        Params::Knn { n_neighbors } => Model::Knn(Knn::fit(x, y, *n_neighbors)),
        Params::Nb { var_smoothing } => Model::Nb(GaussianNb::fit(x, y, *var_smoothing)),
        Params::Xgb {
            n_estimators,
            max_depth,
            learning_rate,
        } => Model::Gbt(Gbt::fit(x, y, &GbtParams::depth_wise(*n_estimators, *max_depth, *learning_rate))),
        Params::Lgbm {
            n_estimators,
            num_leaves,
            learning_rate,
        } => Model::Gbt(Gbt::fit(x, y, &GbtParams::leaf_wise(*n_estimators, *num_leaves, *learning_rate))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::auc;

    fn separable() -> Dataset {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64, ((i * 11) % 7) as f64]).collect();
        let y = (0..60).map(|i| i >= 30).collect();
        Dataset::new(vec!["a".into(), "b".into()], x, y)
    }

    #[test]
    fn every_kind_fits_separable_data() {
        let d = separable();
        for kind in ModelKind::ALL {
            let m = train(&kind.default_params(), &d, 3).unwrap();
            let s = m.predict_batch(&d.x);
            assert!(s.iter().all(|p| (0.0..=1.0).contains(p)), "{kind}");
            assert!(auc(&s, &d.y).unwrap() > 0.95, "{kind}");
        }
        let rf = train(&ModelKind::Rf.default_params(), &d, 3).unwrap();
        assert_eq!(auc(&rf.predict_batch(&d.x), &d.y).unwrap(), 1.0);
    }

    #[test]
    fn single_class_training_fails() {
        let mut d = separable();
        d.y = vec![true; d.n()];
        assert!(matches!(
            train(&ModelKind::Nb.default_params(), &d, 0),
            Err(LearnError::SingleClassTraining)
        ));
    }

    #[test]
    fn params_print_like_a_grid_point() {
        assert_eq!(ModelKind::Rf.default_params().to_string(), "n_estimators=100,max_depth=None");
        assert_eq!("LGBM".parse::<ModelKind>().unwrap(), ModelKind::Lgbm);
        let json = serde_json::to_string(&ModelKind::Knn.default_params()).unwrap();
        assert_eq!(json, r#"{"kind":"knn","n_neighbors":5}"#);
    }
}
