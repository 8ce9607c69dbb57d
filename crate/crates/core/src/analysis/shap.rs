use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::learn::tree::Tree;
use crate::learn::{rng_for, Dataset, Model};

/// Exact enumeration up to this many features; permutation sampling beyond.
pub const EXACT_FEATURE_LIMIT: usize = 15;
const PERMUTATIONS: usize = 200;
const BACKGROUND_ROWS: usize = 32;

/// Units that attributions add up to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputSpace {
    Probability,
    /// Log-odds, for boosted trees.
    Margin,
}

/// Per-record feature attributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapMatrix {
    pub columns: Vec<String>,
    pub base_value: f64,
    pub space: OutputSpace,
    /// One row per record, one entry per column.
    pub values: Vec<Vec<f64>>,
    /// Standard errors when attributions were sampled.
    pub std_err: Option<Vec<Vec<f64>>>,
}

impl ShapMatrix {
    pub fn write_csv(&self, w: impl std::io::Write) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(std::iter::once("record").chain(self.columns.iter().map(String::as_str)))?;
        for (i, row) in self.values.iter().enumerate() {
            wr.write_record(std::iter::once(i.to_string()).chain(row.iter().map(|v| format!("{v:.12e}"))))?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct PathElem {
    feature: usize,
    zero: f64,
    one: f64,
    weight: f64,
}

const NO_FEATURE: usize = usize::MAX;

fn extend(path: &mut Vec<PathElem>, zero: f64, one: f64, feature: usize) {
    let l = path.len();
    path.push(PathElem {
        feature,
        zero,
        one,
        weight: if l == 0 { 1.0 } else { 0.0 },
    });
    for i in (0..l).rev() {
        path[i + 1].weight += one * path[i].weight * (i + 1) as f64 / (l + 1) as f64;
        path[i].weight = zero * path[i].weight * (l - i) as f64 / (l + 1) as f64;
    }
}

fn unwind(path: &mut Vec<PathElem>, i: usize) {
    let l = path.len() - 1;
    let (one, zero) = (path[i].one, path[i].zero);
    let mut n = path[l].weight;
    for j in (0..l).rev() {
        if one != 0.0 {
            let t = path[j].weight;
            path[j].weight = n * (l + 1) as f64 / ((j + 1) as f64 * one);
            n = t - path[j].weight * zero * (l - j) as f64 / (l + 1) as f64;
        } else {
            path[j].weight = path[j].weight * (l + 1) as f64 / (zero * (l - j) as f64);
        }
    }
    for j in i..l {
        path[j].feature = path[j + 1].feature;
        path[j].zero = path[j + 1].zero;
        path[j].one = path[j + 1].one;
    }
    path.pop();
}

fn unwound_sum(path: &[PathElem], i: usize) -> f64 {
    let l = path.len() - 1;
    let (one, zero) = (path[i].one, path[i].zero);
    let mut total = 0.0;
    if one != 0.0 {
        let mut n = path[l].weight;
        for j in (0..l).rev() {
            let t = n / ((j + 1) as f64 * one);
            total += t;
            n = path[j].weight - t * zero * (l - j) as f64;
        }
    } else {
        for j in (0..l).rev() {
            total += path[j].weight / (zero * (l - j) as f64);
        }
    }
    total * (l + 1) as f64
}

fn recurse(tree: &Tree, x: &[f64], phi: &mut [f64], node: usize, mut path: Vec<PathElem>, zero: f64, one: f64, feature: usize) {
    extend(&mut path, zero, one, feature);
    let n = &tree.nodes[node];
    if n.is_leaf() {
        for i in 1..path.len() {
            let w = unwound_sum(&path, i);
            phi[path[i].feature] += w * (path[i].one - path[i].zero) * n.value;
        }
        return;
    }
    let (l, r) = (n.left as usize, n.right as usize);
    let (hot, cold) = if x[n.feature] <= n.threshold { (l, r) } else { (r, l) };
    let fraction = |c: usize| {
        if n.cover > 0.0 {
            tree.nodes[c].cover / n.cover
        } else {
            0.5
        }
    };
    let (mut iz, mut io) = (1.0, 1.0);
    if let Some(k) = path.iter().position(|p| p.feature == n.feature) {
        iz = path[k].zero;
        io = path[k].one;
        unwind(&mut path, k);
    }
    recurse(tree, x, phi, hot, path.clone(), iz * fraction(hot), io, n.feature);
    recurse(tree, x, phi, cold, path, iz * fraction(cold), 0.0, n.feature);
}

/// Cover-weighted mean leaf value.
pub fn expected_value(tree: &Tree) -> f64 {
    fn go(t: &Tree, i: usize) -> f64 {
        let n = &t.nodes[i];
        if n.is_leaf() {
            return n.value;
        }
        let (l, r) = (&t.nodes[n.left as usize], &t.nodes[n.right as usize]);
        let total = l.cover + r.cover;
        let (wl, wr) = if total > 0.0 { (l.cover / total, r.cover / total) } else { (0.5, 0.5) };
        wl * go(t, n.left as usize) + wr * go(t, n.right as usize)
    }
    go(tree, 0)
}

/// Path-dependent Shapley values of one tree at `x`.
pub fn tree_attributions(tree: &Tree, x: &[f64], n_features: usize) -> Vec<f64> {
    let mut phi = vec![0.0; n_features];
    recurse(tree, x, &mut phi, 0, Vec::with_capacity(16), 1.0, 1.0, NO_FEATURE);
    phi
}

/// Attributions of a tree model at `x` and its base value. Forests average
/// their trees; boosted trees add up in margin space.
pub fn tree_shap(model: &Model, x: &[f64]) -> Result<(Vec<f64>, f64), AnalysisError> {
    let p = model.n_features();
    if x.len() != p {
        return Err(AnalysisError::DimensionMismatch {
            expected: p,
            got: x.len(),
        });
    }
    let trees = model.trees().ok_or(AnalysisError::NotTreeModel)?;
    let mut phi = vec![0.0; p];
    let mut base = 0.0;
    for t in trees {
        for (a, b) in phi.iter_mut().zip(tree_attributions(t, x, p)) {
            *a += b;
        }
        base += expected_value(t);
    }
    match model {
        Model::Gbt(g) => base += g.base_score,
        _ => {
            let k = trees.len() as f64;
            phi.iter_mut().for_each(|v| *v /= k);
            base /= k;
        }
    }
    Ok((phi, base))
}

/// Mean prediction over `background` with the features in `mask` taken from `x`.
fn coalition_value(model: &Model, x: &[f64], background: &[Vec<f64>], mask: impl Fn(usize) -> bool) -> f64 {
    let mut row = vec![0.0; x.len()];
    let mut total = 0.0;
    for b in background {
        for j in 0..x.len() {
            row[j] = if mask(j) { x[j] } else { b[j] };
        }
        total += model.predict_proba(&row);
    }
    total / background.len() as f64
}

fn exact_shapley(model: &Model, x: &[f64], background: &[Vec<f64>]) -> Vec<f64> {
    let p = x.len();
    let values: Vec<f64> = (0..1usize << p)
        .map(|m| coalition_value(model, x, background, |j| m >> j & 1 == 1))
        .collect();
    let mut fact = vec![1.0; p + 1];
    for i in 1..=p {
        fact[i] = fact[i - 1] * i as f64;
    }
    let mut phi = vec![0.0; p];
    for (j, slot) in phi.iter_mut().enumerate() {
        for m in 0..1usize << p {
            if m >> j & 1 == 1 {
                continue;
            }
            let s = m.count_ones() as usize;
            let w = fact[s] * fact[p - s - 1] / fact[p];
            *slot += w * (values[m | 1 << j] - values[m]);
        }
    }
    phi
}

fn sampled_shapley(model: &Model, x: &[f64], background: &[Vec<f64>], seed: u64) -> (Vec<f64>, Vec<f64>) {
    let p = x.len();
    let mut rng = rng_for(seed, 0);
    let mut order: Vec<usize> = (0..p).collect();
    let mut sum = vec![0.0; p];
    let mut sq = vec![0.0; p];
    let mut included = vec![false; p];
    for _ in 0..PERMUTATIONS {
        order.shuffle(&mut rng);
        included.fill(false);
        let mut prev = coalition_value(model, x, background, |_| false);
        for &j in &order {
            included[j] = true;
            let next = coalition_value(model, x, background, |k| included[k]);
            let d = next - prev;
            sum[j] += d;
            sq[j] += d * d;
            prev = next;
        }
    }
    let m = PERMUTATIONS as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let se = sq
        .iter()
        .zip(&mean)
        .map(|(s, mu)| ((s / m - mu * mu).max(0.0) / (m - 1.0)).sqrt())
        .collect();
    (mean, se)
}

/// Attributions for every row of `data`. Tree models use the exact tree
/// algorithm; other models are explained against up to 32 rows of
/// `background`.
pub fn explain(model: &Model, data: &Dataset, background: &Dataset, seed: u64) -> Result<ShapMatrix, AnalysisError> {
    let p = model.n_features();
    if data.p() != p {
        return Err(AnalysisError::DimensionMismatch {
            expected: p,
            got: data.p(),
        });
    }
    if model.trees().is_some() {
        let out = data
            .x
            .par_iter()
            .map(|row| tree_shap(model, row))
            .collect::<Result<Vec<_>, _>>()?;
        let base_value = out.first().map_or_else(|| tree_shap(model, &vec![0.0; p]).map(|r| r.1), |r| Ok(r.1))?;
        return Ok(ShapMatrix {
            columns: data.columns.clone(),
            base_value,
            space: if matches!(model, Model::Gbt(_)) {
                OutputSpace::Margin
            } else {
                OutputSpace::Probability
            },
            values: out.into_iter().map(|r| r.0).collect(),
            std_err: None,
        });
    }
    if background.n() == 0 {
        return Err(AnalysisError::EmptyInput);
    }
    let step = background.n().div_ceil(BACKGROUND_ROWS);
    let bg: Vec<Vec<f64>> = background.x.iter().step_by(step).cloned().collect();
    let base_value = coalition_value(model, &vec![0.0; p], &bg, |_| false);
    let exact = p <= EXACT_FEATURE_LIMIT;
    let out: Vec<(Vec<f64>, Vec<f64>)> = data
        .x
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            if exact {
                (exact_shapley(model, row, &bg), vec![0.0; p])
            } else {
                sampled_shapley(model, row, &bg, seed.wrapping_add(i as u64))
            }
        })
        .collect();
    let (values, se): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok(ShapMatrix {
        columns: data.columns.clone(),
        base_value,
        space: OutputSpace::Probability,
        values,
        std_err: if exact { None } else { Some(se) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::tree::Node;

    fn stump() -> Tree {
        let mut root = Node::leaf(100.0, 0.5, [50.0, 50.0]);
        root.feature = 1;
        root.threshold = 0.5;
        root.left = 1;
        root.right = 2;
        Tree {
            nodes: vec![root, Node::leaf(50.0, 0.2, [40.0, 10.0]), Node::leaf(50.0, 0.8, [10.0, 40.0])],
        }
    }

    #[test]
    fn stump_attribution() {
        let m = Model::Tree {
            tree: stump(),
            n_features: 3,
        };
        let (phi, base) = tree_shap(&m, &[0.0, 1.0, 7.0]).unwrap();
        assert!((base - 0.5).abs() < 1e-12);
        assert!((phi[1] - 0.3).abs() < 1e-12);
        assert_eq!(phi[0], 0.0);
        assert_eq!(phi[2], 0.0);
        assert!(matches!(tree_shap(&m, &[0.0]), Err(AnalysisError::DimensionMismatch { expected: 3, got: 1 })));
    }

    #[test]
    fn exact_shapley_on_additive_model_is_centered_input() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let nb = crate::learn::nb::GaussianNb::fit(&x, &[false, true, false, true], 1e-2);
        let m = Model::Nb(nb);
        let phi = exact_shapley(&m, &[1.0, 0.0], &x);
        let bg = coalition_value(&m, &[1.0, 0.0], &x, |_| false);
        assert!((bg + phi.iter().sum::<f64>() - m.predict_proba(&[1.0, 0.0])).abs() < 1e-12);
        assert!(phi[0] > 0.0);
    }
}
