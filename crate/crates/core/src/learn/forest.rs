use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng_for;
use super::tree::{fit_tree, Criterion, Tree, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    /// Features per split; `None` means ⌊√p⌋.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: None,
            criterion: Criterion::Gini,
            max_features: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<Tree>,
    pub n_features: usize,
    /// Seed of each tree's sampling stream.
    pub tree_seeds: Vec<(u64, u64)>,
}

pub fn sqrt_features(p: usize) -> usize {
    ((p as f64).sqrt().floor() as usize).max(1)
}

impl RandomForest {
    pub fn fit(x: &[Vec<f64>], y: &[bool], params: &ForestParams, seed: u64) -> Self {
        let n = x.len();
        let p = x.first().map_or(0, Vec::len);
        let tree_params = TreeParams {
            criterion: params.criterion,
            max_depth: params.max_depth,
            max_features: Some(params.max_features.unwrap_or_else(|| sqrt_features(p))),
            ..TreeParams::default()
        };
        let trees = (0..params.n_estimators)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng_for(seed, t as u64);
                let mut w = vec![0.0; n];
                if params.bootstrap {
                    for _ in 0..n {
                        w[rng.gen_range(0..n)] += 1.0;
                    }
                } else {
                    w.fill(1.0);
                }
                fit_tree(x, y, &w, &tree_params, &mut rng)
            })
            .collect();
        Self {
            trees,
            n_features: p,
            tree_seeds: (0..params.n_estimators as u64).map(|t| (seed, t)).collect(),
        }
    }

    /// Mean of the trees' class-1 probabilities.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}
