use serde::{Deserialize, Serialize};

use super::stats::{cliffs_delta, mann_whitney_p, mean, median};

/// Split acceptance criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkEsdConfig {
    pub alpha: f64,
    /// Cliff's |d| at or below this is negligible.
    pub negligible: f64,
}

impl Default for SkEsdConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            negligible: 0.147,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub treatment: String,
    /// 1 is best.
    pub rank: usize,
    pub median: f64,
    pub mean: f64,
}

/// Treatments ordered by median, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn rank_of(&self, treatment: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.treatment == treatment).map(|e| e.rank)
    }

    pub fn n_ranks(&self) -> usize {
        self.entries.iter().map(|e| e.rank).max().unwrap_or(0)
    }

    /// Treatments holding `rank`.
    pub fn group(&self, rank: usize) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.rank == rank)
            .map(|e| e.treatment.as_str())
            .collect()
    }
}

struct Treatment<'a> {
    name: &'a str,
    values: &'a [f64],
    median: f64,
    mean: f64,
}

fn pooled(ts: &[Treatment]) -> Vec<f64> {
    ts.iter().flat_map(|t| t.values.iter().copied()).collect()
}

/// Split index maximizing the between-group sum of squares of treatment
/// means; earliest wins ties.
fn best_split(ts: &[Treatment]) -> usize {
    let all: Vec<f64> = ts.iter().map(|t| t.mean).collect();
    let grand = mean(&all);
    let mut best = (1, f64::NEG_INFINITY);
    for k in 1..ts.len() {
        let (l, r) = all.split_at(k);
        let (ml, mr) = (mean(l), mean(r));
        let b = l.len() as f64 * (ml - grand).powi(2) + r.len() as f64 * (mr - grand).powi(2);
        if b > best.1 + 1e-12 {
            best = (k, b);
        }
    }
    best.0
}

fn partition(ts: &[Treatment], cfg: &SkEsdConfig, out: &mut Vec<usize>) {
    if ts.len() > 1 {
        let k = best_split(ts);
        let (l, r) = ts.split_at(k);
        let (pl, pr) = (pooled(l), pooled(r));
        let distinct = mann_whitney_p(&pl, &pr) <= cfg.alpha
            && cliffs_delta(&pl, &pr).map_or(false, |e| e.d.abs() > cfg.negligible);
        if distinct {
            partition(l, cfg, out);
            partition(r, cfg, out);
            return;
        }
    }
    out.push(ts.len());
}

/// Scott-Knott effect-size-difference ranking of named distributions.
pub fn scott_knott_esd(treatments: &[(String, Vec<f64>)], cfg: &SkEsdConfig) -> RankTable {
    let mut ts: Vec<Treatment> = treatments
        .iter()
        .map(|(name, values)| Treatment {
            name,
            values,
            median: median(values),
            mean: mean(values),
        })
        .collect();
    ts.sort_by(|a, b| b.median.total_cmp(&a.median).then(b.mean.total_cmp(&a.mean)));
    let mut sizes = Vec::new();
    partition(&ts, cfg, &mut sizes);
    let mut entries = Vec::with_capacity(ts.len());
    let mut it = ts.iter();
    for (g, size) in sizes.into_iter().enumerate() {
        for t in it.by_ref().take(size) {
            entries.push(RankEntry {
                treatment: t.name.to_string(),
                rank: g + 1,
                median: t.median,
                mean: t.mean,
            });
        }
    }
    RankTable { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(name: &str, v: Vec<f64>) -> (String, Vec<f64>) {
        (name.to_string(), v)
    }

    #[test]
    fn constant_treatments_share_one_rank() {
        let r = scott_knott_esd(&[t("a", vec![1.0; 10]), t("b", vec![1.0; 10]), t("c", vec![1.0; 10])], &Default::default());
        assert_eq!(r.n_ranks(), 1);
    }

    #[test]
    fn disjoint_supports_split() {
        let r = scott_knott_esd(
            &[
                t("low", (1..=100).map(f64::from).collect()),
                t("high", (201..=300).map(f64::from).collect()),
            ],
            &Default::default(),
        );
        assert_eq!(r.rank_of("high"), Some(1));
        assert_eq!(r.rank_of("low"), Some(2));
    }

    #[test]
    fn near_twins_share_a_rank() {
        let b: Vec<f64> = (0..50).map(|i| (i % 10) as f64).collect();
        let b2: Vec<f64> = (0..50).map(|i| ((i + 3) % 10) as f64 + 0.01).collect();
        let a: Vec<f64> = b.iter().map(|v| v + 30.0).collect();
        let r = scott_knott_esd(&[t("b", b), t("a", a), t("b2", b2)], &Default::default());
        assert_eq!(r.rank_of("a"), Some(1));
        assert_eq!(r.rank_of("b"), Some(2));
        assert_eq!(r.rank_of("b2"), Some(2));
        assert_eq!(r.group(2).len(), 2);
    }
}
