use serde::{Deserialize, Serialize};

use super::tree::{Node, Tree, LEAF};

/// How each boosted tree is grown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// Level by level up to a depth limit (`None`: unlimited).
    DepthWise { max_depth: Option<usize> },
    /// Best-gain leaf first up to a leaf count (`None`: unlimited).
    LeafWise { num_leaves: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub growth: Growth,
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    /// Minimum hessian sum per child.
    pub min_child_weight: f64,
    /// Minimum samples per child.
    pub min_child_samples: usize,
}

impl GbtParams {
    pub fn depth_wise(n_estimators: usize, max_depth: Option<usize>, learning_rate: f64) -> Self {
        Self {
            n_estimators,
            learning_rate,
            growth: Growth::DepthWise { max_depth },
            lambda: 1.0,
            min_child_weight: 1.0,
            min_child_samples: 1,
        }
    }

    pub fn leaf_wise(n_estimators: usize, num_leaves: Option<usize>, learning_rate: f64) -> Self {
        Self {
            n_estimators,
            learning_rate,
            growth: Growth::LeafWise { num_leaves },
            lambda: 0.0,
            min_child_weight: 1e-3,
            min_child_samples: 20,
        }
    }
}

/// Gradient-boosted trees with logistic loss and Newton leaf weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gbt {
    /// Initial margin (log-odds of the training prior).
    pub base_score: f64,
    pub n_features: usize,
    /// Leaf values already include the learning rate.
    pub trees: Vec<Tree>,
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

struct Open {
    node: usize,
    idx: Vec<usize>,
    depth: usize,
    split: Option<(usize, f64, f64)>,
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    g: &'a [f64],
    h: &'a [f64],
    params: &'a GbtParams,
}

impl Grower<'_> {
    fn score(&self, g: f64, h: f64) -> f64 {
        g * g / (h + self.params.lambda)
    }

    fn weight(&self, idx: &[usize]) -> (f64, f64) {
        let g: f64 = idx.iter().map(|&i| self.g[i]).sum();
        let h: f64 = idx.iter().map(|&i| self.h[i]).sum();
        (-g / (h + self.params.lambda) * self.params.learning_rate, h)
    }

    /// Best (feature, threshold, gain) over all features.
    fn best_split(&self, idx: &[usize]) -> Option<(usize, f64, f64)> {
        let p = self.x.first().map_or(0, Vec::len);
        let (gt, ht): (f64, f64) = idx.iter().fold((0.0, 0.0), |(a, b), &i| (a + self.g[i], b + self.h[i]));
        let parent = self.score(gt, ht);
        let min_n = self.params.min_child_samples.max(1);
        let mut best: Option<(usize, f64, f64)> = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(idx.len());
        for f in 0..p {
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.x[i][f], i)));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (mut gl, mut hl) = (0.0, 0.0);
            for k in 0..sorted.len().saturating_sub(1) {
                let (v, i) = sorted[k];
                gl += self.g[i];
                hl += self.h[i];
                let next = sorted[k + 1].0;
                if v == next || k + 1 < min_n || sorted.len() - k - 1 < min_n {
                    continue;
                }
                let (gr, hr) = (gt - gl, ht - hl);
                if hl < self.params.min_child_weight || hr < self.params.min_child_weight {
                    continue;
                }
                let gain = self.score(gl, hl) + self.score(gr, hr) - parent;
                if gain > 1e-12 && best.map_or(true, |b| gain > b.2) {
                    let mut t = v / 2.0 + next / 2.0;
                    if t >= next {
                        t = v;
                    }
                    best = Some((f, t, gain));
                }
            }
        }
        best
    }

    fn grow(&self) -> Tree {
        let all: Vec<usize> = (0..self.x.len()).collect();
        let (value, cover) = self.weight(&all);
        let mut nodes = vec![Node::leaf(cover, value, [0.0; 2])];
        let depth_ok = |d: usize| match self.params.growth {
            Growth::DepthWise { max_depth } => max_depth.map_or(true, |m| d < m),
            Growth::LeafWise { .. } => true,
        };
        let leaf_cap = match self.params.growth {
            Growth::LeafWise { num_leaves } => num_leaves.unwrap_or(usize::MAX).max(1),
            Growth::DepthWise { .. } => usize::MAX,
        };
        let mut open = vec![Open {
            node: 0,
            split: if depth_ok(0) { self.best_split(&all) } else { None },
            idx: all,
            depth: 0,
        }];
        let mut leaves = 1;
        while leaves < leaf_cap {
            let pick = open
                .iter()
                .enumerate()
                .filter(|(_, o)| o.split.is_some())
                .max_by(|a, b| {
                    let (ga, gb) = (a.1.split.unwrap().2, b.1.split.unwrap().2);
                    ga.total_cmp(&gb).then(b.0.cmp(&a.0))
                })
                .map(|(i, _)| i);
            let Some(i) = pick else { break };
            let o = open.swap_remove(i);
            let (f, t, _) = o.split.unwrap();
            let (l, r): (Vec<usize>, Vec<usize>) = o.idx.iter().partition(|&&k| self.x[k][f] <= t);
            let mut child = |idx: Vec<usize>, nodes: &mut Vec<Node>| {
                let (value, cover) = self.weight(&idx);
                nodes.push(Node::leaf(cover, value, [0.0; 2]));
                let id = nodes.len() - 1;
                let split = if depth_ok(o.depth + 1) { self.best_split(&idx) } else { None };
                open.push(Open {
                    node: id,
                    idx,
                    depth: o.depth + 1,
                    split,
                });
                id as u32
            };
            let left = child(l, &mut nodes);
            let right = child(r, &mut nodes);
            let n = &mut nodes[o.node];
            n.feature = f;
            n.threshold = t;
            n.left = left;
            n.right = right;
            leaves += 1;
        }
        debug_assert!(nodes.iter().all(|n| n.left == LEAF || (n.left as usize) < nodes.len()));
        Tree { nodes }
    }
}

impl Gbt {
    pub fn fit(x: &[Vec<f64>], y: &[bool], params: &GbtParams) -> Self {
        let n = y.len() as f64;
        let pos = y.iter().filter(|&&l| l).count() as f64;
        let prior = (pos / n).clamp(1e-6, 1.0 - 1e-6);
        let base_score = (prior / (1.0 - prior)).ln();
        let mut margin = vec![base_score; y.len()];
        let mut trees = Vec::with_capacity(params.n_estimators);
        let mut g = vec![0.0; y.len()];
        let mut h = vec![0.0; y.len()];
        for _ in 0..params.n_estimators {
            for i in 0..y.len() {
                let p = sigmoid(margin[i]);
                g[i] = p - if y[i] { 1.0 } else { 0.0 };
                h[i] = (p * (1.0 - p)).max(1e-16);
            }
            let tree = Grower {
                x,
                g: &g,
                h: &h,
                params,
            }
            .grow();
            for (m, row) in margin.iter_mut().zip(x) {
                *m += tree.predict(row);
            }
            trees.push(tree);
        }
        Self {
            base_score,
            n_features: x.first().map_or(0, Vec::len),
            trees,
        }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::auc;

    fn toy() -> (Vec<Vec<f64>>, Vec<bool>) {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![(i % 10) as f64, ((i * 7) % 13) as f64]).collect();
        let y = x.iter().map(|r| r[0] >= 5.0).collect();
        (x, y)
    }

    #[test]
    fn depth_wise_learns_threshold() {
        let (x, y) = toy();
        let m = Gbt::fit(&x, &y, &GbtParams::depth_wise(20, Some(2), 0.3));
        let s: Vec<f64> = x.iter().map(|r| m.predict_proba(r)).collect();
        assert_eq!(auc(&s, &y).unwrap(), 1.0);
        assert!(m.trees.iter().all(|t| t.depth() <= 2));
    }

    #[test]
    fn leaf_cap_is_respected() {
        let (x, y) = toy();
        let m = Gbt::fit(&x, &y, &GbtParams::leaf_wise(5, Some(3), 0.1));
        assert!(m.trees.iter().all(|t| t.n_leaves() <= 3));
        assert!(m.trees[0].n_leaves() >= 2);
    }

    #[test]
    fn base_score_is_prior_log_odds() {
        let (x, y) = toy();
        let m = Gbt::fit(&x, &y, &GbtParams::depth_wise(0, None, 0.1));
        assert!(m.base_score.abs() < 1e-12);
        assert!((m.predict_proba(&x[0]) - 0.5).abs() < 1e-12);
    }
}
