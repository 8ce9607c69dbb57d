use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const LEAF: u32 = u32::MAX;

/// Flat binary tree node. Samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub feature: usize,
    pub threshold: f64,
    pub left: u32,
    pub right: u32,
    /// Weighted training samples reaching the node.
    pub cover: f64,
    /// Class-1 probability, or the additive score for boosted trees.
    pub value: f64,
    /// Weighted class counts (negative, positive).
    pub counts: [f64; 2],
}

impl Node {
    pub fn leaf(cover: f64, value: f64, counts: [f64; 2]) -> Self {
        Self {
            feature: 0,
            threshold: 0.0,
            left: LEAF,
            right: LEAF,
            cover,
            value,
            counts,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.left == LEAF
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            let n = &self.nodes[i];
            if n.is_leaf() {
                return n.value;
            }
            i = if x[n.feature] <= n.threshold { n.left } else { n.right } as usize;
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            let n = &t.nodes[i];
            if n.is_leaf() {
                0
            } else {
                1 + go(t, n.left as usize).max(go(t, n.right as usize))
            }
        }
        go(self, 0)
    }

    /// Features used by any split.
    pub fn used_features(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter(|n| !n.is_leaf()).map(|n| n.feature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Gini,
    Entropy,
    LogLoss,
}

impl Criterion {
    pub fn impurity(self, counts: [f64; 2]) -> f64 {
        let total = counts[0] + counts[1];
        if total <= 0.0 {
            return 0.0;
        }
        let p = counts[1] / total;
        match self {
            Criterion::Gini => 2.0 * p * (1.0 - p),
            Criterion::Entropy | Criterion::LogLoss => {
                let h = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
                h(p) + h(1.0 - p)
            }
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
            Criterion::LogLoss => "log_loss",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features examined per split; `None` examines all.
    pub max_features: Option<usize>,
    pub ccp_alpha: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
            ccp_alpha: 0.0,
        }
    }
}

struct Builder<'a, R> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    w: &'a [f64],
    params: &'a TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
    features: Vec<usize>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl<R: Rng> Builder<'_, R> {
    fn counts(&self, idx: &[usize]) -> [f64; 2] {
        let mut c = [0.0; 2];
        for &i in idx {
            c[self.y[i] as usize] += self.w[i];
        }
        c
    }

    fn best_split(&mut self, idx: &[usize], counts: [f64; 2]) -> Option<BestSplit> {
        let crit = self.params.criterion;
        let total = counts[0] + counts[1];
        let parent = crit.impurity(counts);
        let min_leaf = self.params.min_samples_leaf;
        let max_features = self.params.max_features.unwrap_or(self.features.len()).max(1);
        self.features.shuffle(self.rng);
        let mut best: Option<BestSplit> = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(idx.len());
        for (visited, &f) in self.features.iter().enumerate() {
            if visited >= max_features && best.is_some() {
                break;
            }
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.x[i][f], i)));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            if sorted[0].0 == sorted[sorted.len() - 1].0 {
                continue;
            }
            let mut left = [0.0; 2];
            for k in 0..sorted.len() - 1 {
                let (v, i) = sorted[k];
                left[self.y[i] as usize] += self.w[i];
                let next = sorted[k + 1].0;
                if v == next || k + 1 < min_leaf || sorted.len() - k - 1 < min_leaf {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let (wl, wr) = (left[0] + left[1], right[0] + right[1]);
                let child = (wl * crit.impurity(left) + wr * crit.impurity(right)) / total;
                let gain = parent - child;
                if best.as_ref().map_or(true, |b| gain > b.score + 1e-12) {
                    let mut threshold = v / 2.0 + next / 2.0;
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        score: gain,
                    });
                }
            }
        }
        best.filter(|b| b.score > 0.0)
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> u32 {
        let counts = self.counts(idx);
        let cover = counts[0] + counts[1];
        let value = if cover > 0.0 { counts[1] / cover } else { 0.0 };
        let id = self.nodes.len();
        self.nodes.push(Node::leaf(cover, value, counts));
        let pure = counts[0] == 0.0 || counts[1] == 0.0;
        let depth_ok = self.params.max_depth.map_or(true, |d| depth < d);
        if pure || !depth_ok || idx.len() < self.params.min_samples_split.max(2) {
            return id as u32;
        }
        let Some(split) = self.best_split(idx, counts) else {
            return id as u32;
        };
        let x = self.x;
        let mid = partition(idx, |&i| x[i][split.feature] <= split.threshold);
        let (l, r) = idx.split_at_mut(mid);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        let node = &mut self.nodes[id];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        id as u32
    }
}

fn partition<T>(v: &mut [T], pred: impl Fn(&T) -> bool) -> usize {
    let mut k = 0;
    for i in 0..v.len() {
        if pred(&v[i]) {
            v.swap(i, k);
            k += 1;
        }
    }
    k
}

/// Grow a classification tree on rows with positive weight.
pub fn fit_tree(x: &[Vec<f64>], y: &[bool], w: &[f64], params: &TreeParams, rng: &mut impl Rng) -> Tree {
    let p = x.first().map_or(0, Vec::len);
    let mut idx: Vec<usize> = (0..x.len()).filter(|&i| w[i] > 0.0).collect();
    let mut b = Builder {
        x,
        y,
        w,
        params,
        rng,
        nodes: Vec::new(),
        features: (0..p).collect(),
    };
    b.grow(&mut idx, 0);
    let mut tree = Tree { nodes: b.nodes };
    if params.ccp_alpha > 0.0 {
        prune(&mut tree, params.criterion, params.ccp_alpha);
    }
    tree
}

/// Minimal cost-complexity pruning: repeatedly collapse the weakest link
/// while its effective alpha is at most `alpha`.
fn prune(tree: &mut Tree, crit: Criterion, alpha: f64) {
    let total = tree.nodes[0].cover;
    if total <= 0.0 {
        return;
    }
    let risk = |n: &Node| crit.impurity(n.counts) * n.cover / total;
    loop {
        // (subtree risk, leaves) per node, children before parents
        let mut stats = vec![(0.0, 0usize); tree.nodes.len()];
        fn walk(t: &Tree, i: usize, risk: &dyn Fn(&Node) -> f64, out: &mut [(f64, usize)]) {
            let n = &t.nodes[i];
            if n.is_leaf() {
                out[i] = (risk(n), 1);
            } else {
                walk(t, n.left as usize, risk, out);
                walk(t, n.right as usize, risk, out);
                let (l, r) = (out[n.left as usize], out[n.right as usize]);
                out[i] = (l.0 + r.0, l.1 + r.1);
            }
        }
        walk(tree, 0, &risk, &mut stats);
        let mut weakest: Option<(usize, f64)> = None;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &tree.nodes[i];
            if n.is_leaf() {
                continue;
            }
            let g = (risk(n) - stats[i].0) / (stats[i].1 as f64 - 1.0);
            if weakest.map_or(true, |(_, w)| g < w) {
                weakest = Some((i, g));
            }
            stack.push(n.right as usize);
            stack.push(n.left as usize);
        }
        match weakest {
            Some((i, g)) if g <= alpha => {
                tree.nodes[i].left = LEAF;
                tree.nodes[i].right = LEAF;
            }
            _ => break,
        }
    }
    compact(tree);
}

/// Drop nodes no longer reachable from the root.
fn compact(tree: &mut Tree) {
    let mut out = Vec::new();
    fn copy(src: &[Node], i: usize, out: &mut Vec<Node>) -> u32 {
        let id = out.len();
        out.push(src[i].clone());
        if !src[i].is_leaf() {
            let l = copy(src, src[i].left as usize, out);
            let r = copy(src, src[i].right as usize, out);
            out[id].left = l;
            out[id].right = r;
        }
        id as u32
    }
    copy(&tree.nodes, 0, &mut out);
    tree.nodes = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (Vec<Vec<f64>>, Vec<bool>) {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let y = (0..20).map(|i| i >= 10).collect();
        (x, y)
    }

    #[test]
    fn separable_data_gives_one_split() {
        let (x, y) = toy();
        let w = vec![1.0; 20];
        let t = fit_tree(&x, &y, &w, &TreeParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(t.nodes[0].feature, 0);
        assert_eq!(t.nodes[0].threshold, 9.5);
        assert_eq!(t.predict(&[3.0, 0.0]), 0.0);
        assert_eq!(t.predict(&[12.0, 0.0]), 1.0);
    }

    #[test]
    fn depth_limit_and_leaf_counts() {
        let x: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64]).collect();
        let y: Vec<bool> = (0..32).map(|i| i % 2 == 0).collect();
        let w = vec![1.0; 32];
        let params = TreeParams {
            max_depth: Some(2),
            ..Default::default()
        };
        let t = fit_tree(&x, &y, &w, &params, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(t.depth() <= 2);
        for n in t.nodes.iter().filter(|n| n.is_leaf()) {
            assert!((n.counts[0] + n.counts[1] - n.cover).abs() < 1e-12);
        }
    }

    #[test]
    fn heavy_pruning_leaves_a_stump() {
        let x: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64]).collect();
        let y: Vec<bool> = (0..32).map(|i| i % 2 == 0).collect();
        let w = vec![1.0; 32];
        let params = TreeParams {
            ccp_alpha: 0.5,
            ..Default::default()
        };
        let t = fit_tree(&x, &y, &w, &params, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&[5.0]), 0.5);
    }
}
