use serde::{Deserialize, Serialize};

/// Row-major feature table with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<bool>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, x: Vec<Vec<f64>>, y: Vec<bool>) -> Self {
        assert_eq!(x.len(), y.len(), "row count mismatch");
        assert!(x.iter().all(|r| r.len() == columns.len()), "ragged rows");
        Self { columns, x, y }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&l| l).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.positives();
        pos > 0 && pos < self.n()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.x.iter().map(|r| r[j]).collect()
    }

    /// Rows at `indices`, repeats allowed.
    pub fn rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            x: indices.iter().map(|&i| self.x[i].clone()).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Columns named in `keep`, in that order. Unknown names are skipped.
    pub fn select(&self, keep: &[String]) -> Dataset {
        let idx: Vec<usize> = keep
            .iter()
            .filter_map(|k| self.columns.iter().position(|c| c == k))
            .collect();
        Dataset {
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
            x: self.x.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            y: self.y.clone(),
        }
    }

    pub fn with_labels(&self, y: Vec<bool>) -> Dataset {
        Dataset::new(self.columns.clone(), self.x.clone(), y)
    }
}
