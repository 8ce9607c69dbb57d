use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::shap::ShapMatrix;
use super::skesd::{scott_knott_esd, RankTable, SkEsdConfig};
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionImportance {
    /// Per dimension, the per-record sum of |φ| over its columns.
    pub distributions: Vec<(String, Vec<f64>)>,
    pub ranks: RankTable,
}

/// Groups attributions by dimension. `dimension_map` may list columns that
/// are absent from `shap` (dropped by selection); every column of `shap`
/// must belong to exactly one dimension.
pub fn dimension_importance(
    shap: &ShapMatrix,
    dimension_map: &BTreeMap<String, Vec<String>>,
    cfg: &SkEsdConfig,
) -> Result<DimensionImportance, AnalysisError> {
    let mut owner: Vec<Option<usize>> = vec![None; shap.columns.len()];
    let dims: Vec<&String> = dimension_map.keys().collect();
    for (d, cols) in dimension_map.values().enumerate() {
        for c in cols {
            if let Some(j) = shap.columns.iter().position(|x| x == c) {
                if let Some(prev) = owner[j] {
                    if prev != d {
                        return Err(AnalysisError::PartitionError(format!(
                            "column {c} is in both {} and {}",
                            dims[prev], dims[d]
                        )));
                    }
                }
                owner[j] = Some(d);
            }
        }
    }
    if let Some(j) = owner.iter().position(Option::is_none) {
        return Err(AnalysisError::PartitionError(format!(
            "column {} belongs to no dimension",
            shap.columns[j]
        )));
    }
    let mut sums = vec![vec![0.0; shap.values.len()]; dims.len()];
    for (r, row) in shap.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            sums[owner[j].unwrap()][r] += v.abs();
        }
    }
    let distributions: Vec<(String, Vec<f64>)> = dims.into_iter().cloned().zip(sums).collect();
    let ranks = scott_knott_esd(&distributions, cfg);
    Ok(DimensionImportance { distributions, ranks })
}
