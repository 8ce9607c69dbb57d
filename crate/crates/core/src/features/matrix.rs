use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};

use serde_json::json;

use super::{column_names, Dimension, FeatureRow, PairKey};
use crate::labeling::Setting;
use crate::learn::Dataset;

pub const SIDECAR_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("duplicate pair key {0:?}")]
    DuplicatePairKey(PairKey),
    #[error("malformed feature matrix: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub key: PairKey,
    pub labels: BTreeMap<Setting, bool>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub column_names: Vec<String>,
    /// Column indices of each dimension; columns of unknown dimension are
    /// not listed.
    pub dimension_map: BTreeMap<Dimension, Vec<usize>>,
    pub rows: Vec<MatrixRow>,
}

fn dimension_map_of(columns: &[String]) -> BTreeMap<Dimension, Vec<usize>> {
    let mut map: BTreeMap<Dimension, Vec<usize>> = BTreeMap::new();
    for (i, c) in columns.iter().enumerate() {
        if let Some(d) = Dimension::of_column(c) {
            map.entry(d).or_default().push(i);
        }
    }
    map
}

/// Combine feature rows with their labels; rows without labels are kept
/// with an empty label map.
pub fn assemble_matrix(
    rows: Vec<FeatureRow>,
    labels: &BTreeMap<PairKey, BTreeMap<Setting, bool>>,
) -> Result<FeatureMatrix, FeatureError> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        if !seen.insert(row.key.clone()) {
            return Err(FeatureError::DuplicatePairKey(row.key));
        }
        out.push(MatrixRow {
            labels: labels.get(&row.key).cloned().unwrap_or_default(),
            values: row.values(),
            key: row.key,
        });
    }
    let column_names = column_names();
    Ok(FeatureMatrix {
        dimension_map: dimension_map_of(&column_names),
        column_names,
        rows: out,
    })
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.column_names.len()
    }

    /// Settings labelled on at least one row.
    pub fn settings(&self) -> Vec<Setting> {
        let s: BTreeSet<Setting> = self.rows.iter().flat_map(|r| r.labels.keys().copied()).collect();
        s.into_iter().collect()
    }

    /// Labelled rows of `setting` as a learning dataset.
    pub fn dataset(&self, setting: Setting) -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for r in &self.rows {
            if let Some(&l) = r.labels.get(&setting) {
                x.push(r.values.clone());
                y.push(l);
            }
        }
        Dataset::new(self.column_names.clone(), x, y)
    }

    /// Keep only `columns`, in the given order.
    pub fn select_columns(&self, columns: &[String]) -> Result<FeatureMatrix, FeatureError> {
        let idx: Vec<usize> = columns
            .iter()
            .map(|c| {
                self.column_names
                    .iter()
                    .position(|n| n == c)
                    .ok_or_else(|| FeatureError::Format(format!("no column {c}")))
            })
            .collect::<Result<_, _>>()?;
        Ok(FeatureMatrix {
            column_names: columns.to_vec(),
            dimension_map: dimension_map_of(columns),
            rows: self
                .rows
                .iter()
                .map(|r| MatrixRow {
                    key: r.key.clone(),
                    labels: r.labels.clone(),
                    values: idx.iter().map(|&i| r.values[i]).collect(),
                })
                .collect(),
        })
    }

    /// CSV with `project_id, developer`, one column per labelled setting,
    /// then the feature columns.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FeatureError> {
        let settings = self.settings();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["project_id".to_string(), "developer".to_string()];
        header.extend(settings.iter().map(|s| s.to_string()));
        header.extend(self.column_names.iter().cloned());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.key.project_id.clone(), r.key.developer.clone()];
            rec.extend(settings.iter().map(|s| match r.labels.get(s) {
                Some(true) => "true".to_string(),
                Some(false) => "false".to_string(),
                None => String::new(),
            }));
            rec.extend(r.values.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<FeatureMatrix, FeatureError> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < 2 || header[0] != "project_id" || header[1] != "developer" {
            return Err(FeatureError::Format("header must start with project_id,developer".into()));
        }
        let mut label_cols = Vec::new();
        let mut feature_cols = Vec::new();
        for (i, h) in header.iter().enumerate().skip(2) {
            match h.parse::<Setting>() {
                Ok(s) if h.starts_with("LTC-") => label_cols.push((i, s)),
                _ => feature_cols.push(i),
            }
        }
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let mut labels = BTreeMap::new();
            for &(i, s) in &label_cols {
                match &rec[i] {
                    "" => {}
                    "true" | "1" => {
                        labels.insert(s, true);
                    }
                    "false" | "0" => {
                        labels.insert(s, false);
                    }
                    other => return Err(FeatureError::Format(format!("row {}: bad label {other:?}", line + 2))),
                }
            }
            let values = feature_cols
                .iter()
                .map(|&i| {
                    rec[i]
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| FeatureError::Format(format!("row {}: bad value {:?} in {}", line + 2, &rec[i], header[i])))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(MatrixRow {
                key: PairKey {
                    project_id: rec[0].to_string(),
                    developer: rec[1].to_string(),
                },
                labels,
                values,
            });
        }
        let column_names: Vec<String> = feature_cols.iter().map(|&i| header[i].clone()).collect();
        Ok(FeatureMatrix {
            dimension_map: dimension_map_of(&column_names),
            column_names,
            rows,
        })
    }

    /// Companion JSON describing the columns and the extraction settings.
    pub fn sidecar(&self, window_days: u32) -> serde_json::Value {
        let dims: BTreeMap<String, &Vec<usize>> = self
            .dimension_map
            .iter()
            .map(|(d, cols)| (d.to_string(), cols))
            .collect();
        json!({
            "version": SIDECAR_VERSION,
            "n_rows": self.n_rows(),
            "columns": self.column_names,
            "dimension_map": dims,
            "settings": self.settings().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "knobs": {
                "window_days": window_days,
                "window": "half-open, UTC seconds from the initial commit",
                "dev_exp_aggregation": "sum over commit-file occurrences, full file content at each commit",
                "median": "mean of the two middle values for even counts",
                "collaborator_scope": "commits in the studied project before the initial commit",
                "unlinked_collaborators": "dropped",
                "deleted_files": "contribute zero",
            }
        })
    }
}
