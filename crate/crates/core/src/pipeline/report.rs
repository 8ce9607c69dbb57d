use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::stages::{ComparisonRow, StatsFile};
use crate::analysis::stats::mean;
use crate::analysis::RankTable;
use crate::learn::AucTable;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: String,
    pub repetitions: usize,
    pub median_auc: f64,
    pub mean_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub models: Vec<ModelSummary>,
    pub comparisons: Vec<ComparisonRow>,
    pub model_ranks: BTreeMap<String, RankTable>,
    /// Dimension ranks per setting; absent when explain did not run.
    pub dimension_ranks: Option<BTreeMap<String, RankTable>>,
    pub notes: Vec<String>,
}

pub fn build_report(
    table: &AucTable,
    stats: &StatsFile,
    importance: Option<BTreeMap<String, RankTable>>,
) -> Report {
    let models = table
        .models()
        .into_iter()
        .map(|m| {
            let aucs = table.aucs(&m);
            ModelSummary {
                repetitions: aucs.len(),
                median_auc: table.median(&m).unwrap_or(f64::NAN),
                mean_auc: mean(&aucs),
                model: m,
            }
        })
        .collect();
    let mut notes = Vec::new();
    if importance.is_none() {
        notes.push("explain stage did not run; dimension importance omitted".to_string());
    }
    Report {
        version: REPORT_VERSION,
        models,
        comparisons: stats.comparisons.clone(),
        model_ranks: stats.rankings.clone(),
        dimension_ranks: importance,
        notes,
    }
}

fn rank_table(out: &mut String, title: &str, t: &RankTable) {
    let _ = writeln!(out, "### {title}\n\n| rank | treatment | median | mean |\n|---:|---|---:|---:|");
    for e in &t.entries {
        let _ = writeln!(out, "| {} | {} | {:.4} | {:.4} |", e.rank, e.treatment, e.median, e.mean);
    }
    out.push('\n');
}

impl Report {
    pub fn markdown(&self) -> String {
        let mut out = String::from("# LTC prediction report\n\n## Out-of-sample AUC\n\n");
        out.push_str("| model | repetitions | median AUC | mean AUC |\n|---|---:|---:|---:|\n");
        for m in &self.models {
            let _ = writeln!(out, "| {} | {} | {:.4} | {:.4} |", m.model, m.repetitions, m.median_auc, m.mean_auc);
        }
        out.push_str("\n## Paired comparisons\n\n");
        if self.comparisons.is_empty() {
            out.push_str("No comparisons were configured.\n");
        } else {
            out.push_str("| model | baseline | median | baseline median | Wilcoxon p | Cliff's d | magnitude | improvement % |\n");
            out.push_str("|---|---|---:|---:|---:|---:|---|---:|\n");
            for c in &self.comparisons {
                let imp = c.improvement_pct.map_or("n/a".to_string(), |v| format!("{v:.2}"));
                let _ = writeln!(
                    out,
                    "| {} | {} | {:.4} | {:.4} | {:.3e} | {:.3} | {} | {imp} |",
                    c.model, c.baseline, c.median_model, c.median_baseline, c.wilcoxon_p, c.cliffs_delta, c.magnitude
                );
            }
        }
        out.push_str("\n## Model ranks\n\n");
        for (g, t) in &self.model_ranks {
            rank_table(&mut out, g, t);
        }
        out.push_str("## Dimension importance\n\n");
        match &self.dimension_ranks {
            Some(ranks) => {
                for (s, t) in ranks {
                    rank_table(&mut out, s, t);
                }
            }
            None => out.push_str("Not available.\n\n"),
        }
        if !self.notes.is_empty() {
            out.push_str("## Notes\n\n");
            for n in &self.notes {
                let _ = writeln!(out, "- {n}");
            }
        }
        out
    }
}
