//! The five KU feature dimensions and the feature matrix.

mod extract;
mod matrix;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ku::{KuVector, KU_COUNT};

pub use extract::{Corpus, FeatureExtractor, ProjectData};
pub use matrix::{assemble_matrix, FeatureError, FeatureMatrix, MatrixRow, SIDECAR_VERSION};

pub const WINDOW_DAYS: u32 = 30;
pub const N_FEATURES: usize = KU_COUNT * Dimension::ALL.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Dimension {
    DevExp,
    PrevExp,
    CollabExp,
    Proj,
    PrevProj,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::DevExp,
        Dimension::PrevExp,
        Dimension::CollabExp,
        Dimension::Proj,
        Dimension::PrevProj,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Dimension::DevExp => "DEV_EXP",
            Dimension::PrevExp => "PREV_EXP",
            Dimension::CollabExp => "COLLAB_EXP",
            Dimension::Proj => "PROJ",
            Dimension::PrevProj => "PREV_PROJ",
        }
    }

    pub fn position(self) -> usize {
        Self::ALL.iter().position(|d| *d == self).unwrap()
    }

    /// Dimension of a `<DIM>_K<i>` column name.
    pub fn of_column(name: &str) -> Option<Dimension> {
        let (prefix, ku) = name.rsplit_once("_K")?;
        ku.parse::<usize>().ok().filter(|k| (1..=KU_COUNT).contains(k))?;
        Self::ALL.into_iter().find(|d| d.prefix() == prefix)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// The 140 column names in canonical order.
pub fn column_names() -> Vec<String> {
    Dimension::ALL
        .iter()
        .flat_map(|d| (1..=KU_COUNT).map(move |k| format!("{}_K{k}", d.prefix())))
        .collect()
}

pub type DimVector = [f64; KU_COUNT];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairKey {
    pub project_id: String,
    pub developer: String,
}

/// Feature values of one developer/project pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub key: PairKey,
    pub dev_exp: DimVector,
    pub prev_exp: DimVector,
    pub collab_exp: DimVector,
    pub proj: DimVector,
    pub prev_proj: DimVector,
}

impl FeatureRow {
    pub fn zeros(key: PairKey) -> Self {
        let z = [0.0; KU_COUNT];
        Self {
            key,
            dev_exp: z,
            prev_exp: z,
            collab_exp: z,
            proj: z,
            prev_proj: z,
        }
    }

    pub fn dimension(&self, d: Dimension) -> &DimVector {
        match d {
            Dimension::DevExp => &self.dev_exp,
            Dimension::PrevExp => &self.prev_exp,
            Dimension::CollabExp => &self.collab_exp,
            Dimension::Proj => &self.proj,
            Dimension::PrevProj => &self.prev_proj,
        }
    }

    /// Values in [`column_names`] order.
    pub fn values(&self) -> Vec<f64> {
        Dimension::ALL
            .iter()
            .flat_map(|d| self.dimension(*d).iter().copied())
            .collect()
    }
}

/// Elementwise sample median; even counts average the two middle values and
/// an empty input gives zeros.
pub fn median_vector(vectors: &[KuVector]) -> DimVector {
    let mut out = [0.0; KU_COUNT];
    if vectors.is_empty() {
        return out;
    }
    let mut column = Vec::with_capacity(vectors.len());
    for (k, slot) in out.iter_mut().enumerate() {
        column.clear();
        column.extend(vectors.iter().map(|v| v.counts[k]));
        column.sort_unstable();
        let n = column.len();
        *slot = if n % 2 == 1 {
            column[n / 2] as f64
        } else {
            (column[n / 2 - 1] as f64 + column[n / 2] as f64) / 2.0
        };
    }
    out
}

pub fn as_dim(v: &KuVector) -> DimVector {
    v.as_f64()
}
