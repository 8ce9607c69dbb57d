use serde::{Deserialize, Serialize};

/// k-nearest neighbours with uniform weights and Euclidean distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub n_neighbors: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<bool>,
}

impl Knn {
    pub fn fit(x: &[Vec<f64>], y: &[bool], n_neighbors: usize) -> Self {
        Self {
            n_neighbors: n_neighbors.max(1),
            x: x.to_vec(),
            y: y.to_vec(),
        }
    }

    /// Share of positives among the k nearest rows (k capped at the
    /// training size; distance ties broken by row order).
    pub fn predict_proba(&self, q: &[f64]) -> f64 {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let k = self.n_neighbors.min(d.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
        }
        d[..k].iter().filter(|(_, i)| self.y[*i]).count() as f64 / k as f64
    }
}
