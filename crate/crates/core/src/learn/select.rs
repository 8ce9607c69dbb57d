use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::auc::midranks;
use super::Dataset;

pub const DEFAULT_SPEARMAN_THRESHOLD: f64 = 0.7;
pub const DEFAULT_VIF_THRESHOLD: f64 = 5.0;

/// VIF values above this are treated as infinite (exact collinearity).
const VIF_INFINITE: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    CorrelatedWith(String),
    HighVif,
}

impl std::fmt::Display for DropReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DropReason::CorrelatedWith(c) => write!(f, "correlated-with {c}"),
            DropReason::HighVif => f.write_str("high-VIF"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub kept_columns: Vec<String>,
    pub dropped: Vec<(String, DropReason)>,
    pub spearman_threshold: f64,
    pub vif_threshold: f64,
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// Spearman rank correlation; 0 when either input is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    pearson(&midranks(a), &midranks(b))
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|x| *x == v[0])
}

/// Variance inflation factors of `columns` (each regressed on the others
/// with an intercept). Constant columns get 1.
pub fn vif(columns: &[Vec<f64>]) -> Vec<f64> {
    let live: Vec<usize> = (0..columns.len()).filter(|&j| !is_constant(&columns[j])).collect();
    let mut out = vec![1.0; columns.len()];
    if live.len() < 2 {
        return out;
    }
    let k = live.len();
    let corr = DMatrix::from_fn(k, k, |a, b| {
        if a == b {
            1.0
        } else {
            pearson(&columns[live[a]], &columns[live[b]])
        }
    });
    let inverse = corr.clone().try_inverse();
    for (a, &j) in live.iter().enumerate() {
        let v = match &inverse {
            Some(inv) if inv[(a, a)].is_finite() && inv[(a, a)] >= 1.0 - 1e-9 => inv[(a, a)],
            _ => vif_by_regression(&corr, a),
        };
        out[j] = if v > VIF_INFINITE { f64::INFINITY } else { v };
    }
    out
}

/// 1 / (1 - R²) from the least-squares fit of column `a` on the others,
/// solved on the correlation matrix with a pseudo-inverse.
fn vif_by_regression(corr: &DMatrix<f64>, a: usize) -> f64 {
    let others: Vec<usize> = (0..corr.nrows()).filter(|&b| b != a).collect();
    let sub = DMatrix::from_fn(others.len(), others.len(), |i, j| corr[(others[i], others[j])]);
    let r = DMatrix::from_fn(others.len(), 1, |i, _| corr[(others[i], a)]);
    let Ok(pinv) = sub.pseudo_inverse(1e-10) else {
        return f64::INFINITY;
    };
    let r2 = (r.transpose() * pinv * &r)[(0, 0)];
    if r2 >= 1.0 - 1e-12 {
        f64::INFINITY
    } else {
        1.0 / (1.0 - r2)
    }
}

/// Two-stage selection: remove Spearman-correlated features, then features
/// with high variance inflation.
pub fn autospearman(data: &Dataset, spearman_threshold: f64, vif_threshold: f64) -> SelectionResult {
    let p = data.p();
    let columns: Vec<Vec<f64>> = (0..p).map(|j| data.column(j)).collect();
    let ranks: Vec<Vec<f64>> = columns.iter().map(|c| midranks(c)).collect();
    let mut rho = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in a + 1..p {
            let r = pearson(&ranks[a], &ranks[b]).abs();
            rho[a][b] = r;
            rho[b][a] = r;
        }
    }

    let mut kept: Vec<usize> = (0..p).collect();
    let mut dropped = Vec::new();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, &a) in kept.iter().enumerate() {
            for &b in &kept[i + 1..] {
                let r = rho[a][b];
                if r >= spearman_threshold && best.map_or(true, |(_, _, br)| r > br) {
                    best = Some((a, b, r));
                }
            }
        }
        let Some((a, b, _)) = best else { break };
        let mean_to_rest = |x: usize| {
            let others: Vec<f64> = kept.iter().filter(|&&o| o != x).map(|&o| rho[x][o]).collect();
            others.iter().sum::<f64>() / others.len() as f64
        };
        let (ma, mb) = (mean_to_rest(a), mean_to_rest(b));
        let (drop, keep) = if ma > mb { (a, b) } else { (b, a) };
        kept.retain(|&c| c != drop);
        dropped.push((
            data.columns[drop].clone(),
            DropReason::CorrelatedWith(data.columns[keep].clone()),
        ));
    }

    loop {
        let cols: Vec<Vec<f64>> = kept.iter().map(|&j| columns[j].clone()).collect();
        let v = vif(&cols);
        let mut worst: Option<(usize, f64)> = None;
        for (i, &x) in v.iter().enumerate() {
            if x >= vif_threshold && worst.map_or(true, |(_, w)| x >= w) {
                worst = Some((i, x));
            }
        }
        let Some((i, _)) = worst else { break };
        let j = kept.remove(i);
        dropped.push((data.columns[j].clone(), DropReason::HighVif));
    }

    SelectionResult {
        kept_columns: kept.iter().map(|&j| data.columns[j].clone()).collect(),
        dropped,
        spearman_threshold,
        vif_threshold,
    }
}
