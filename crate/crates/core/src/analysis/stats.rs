use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::AnalysisError;
use crate::learn::midranks;

/// Largest effective sample size that gets the exact signed-rank null.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(d: f64) -> Self {
        match d.abs() {
            a if a <= 0.147 => Magnitude::Negligible,
            a if a <= 0.33 => Magnitude::Small,
            a if a <= 0.474 => Magnitude::Medium,
            _ => Magnitude::Large,
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    pub d: f64,
    pub magnitude: Magnitude,
}

fn two_sided_normal(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Sum of t³ - t over groups of tied values.
fn tie_term(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        total += t * t * t - t;
        i = j;
    }
    total
}

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(1.0);
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    if n <= EXACT_LIMIT {
        return Ok(exact_signed_rank_p(&ranks, w_plus));
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&abs) / 48.0;
    if var <= 0.0 {
        return Ok(1.0);
    }
    Ok(two_sided_normal((w_plus - mean) / var.sqrt()))
}

/// Exact null over all 2ⁿ sign assignments, counted on doubled ranks so that
/// midranks stay integral.
fn exact_signed_rank_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let all = 2f64.powi(ranks.len() as i32);
    let w = (w_plus * 2.0).round() as usize;
    let lower: f64 = counts[..=w].iter().sum();
    let upper: f64 = counts[w..].iter().sum();
    (2.0 * lower.min(upper) / all).min(1.0)
}

/// Cliff's delta of `a` against `b`.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<EffectSize, AnalysisError> {
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut dominance: i64 = 0;
    for x in a {
        let below = sorted.partition_point(|y| y < x) as i64;
        let above = (sorted.len() - sorted.partition_point(|y| y <= x)) as i64;
        dominance += below - above;
    }
    let d = dominance as f64 / (a.len() * b.len()) as f64;
    Ok(EffectSize {
        d,
        magnitude: Magnitude::of(d),
    })
}

/// Two-sided Mann-Whitney U test, normal approximation with tie and
/// continuity corrections.
pub fn mann_whitney_p(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let n = n1 + n2;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term(&pooled) / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
    two_sided_normal(z)
}

/// Share of the remaining headroom gained over the baseline, in percent.
pub fn normalized_auc_improvement(model_auc: f64, baseline_auc: f64) -> Result<f64, AnalysisError> {
    if baseline_auc >= 1.0 {
        return Err(AnalysisError::BaselineAtCeiling);
    }
    Ok((model_auc - baseline_auc) / (1.0 - baseline_auc) * 100.0)
}

/// Mean of the per-repetition normalized improvements of paired AUC lists.
pub fn mean_normalized_improvement(model: &[f64], baseline: &[f64]) -> Result<f64, AnalysisError> {
    if model.len() != baseline.len() {
        return Err(AnalysisError::LengthMismatch {
            left: model.len(),
            right: baseline.len(),
        });
    }
    if model.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let mut total = 0.0;
    for (m, b) in model.iter().zip(baseline) {
        total += normalized_auc_improvement(*m, *b)?;
    }
    Ok(total / model.len() as f64)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
