//! Long-time-contributor labels.
//!
//! A developer is an LTC under setting `LTC-T` when their commits in the
//! project span more than `T` years and, in each of the first `T` years after
//! joining, they commit more than the 10th percentile of the other developers
//! active in that year.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::mining::{CommitRecord, DevProjectPair, SECONDS_PER_DAY};

pub const DAYS_PER_YEAR: i64 = 365;
pub const PERCENTILE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Setting {
    #[serde(rename = "LTC-1")]
    Ltc1,
    #[serde(rename = "LTC-2")]
    Ltc2,
    #[serde(rename = "LTC-3")]
    Ltc3,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::Ltc1, Setting::Ltc2, Setting::Ltc3];

    pub fn years(self) -> u32 {
        match self {
            Setting::Ltc1 => 1,
            Setting::Ltc2 => 2,
            Setting::Ltc3 => 3,
        }
    }

    pub fn from_years(t: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.years() == t)
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LTC-{}", self.years())
    }
}

impl FromStr for Setting {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.strip_prefix("LTC-").unwrap_or(s);
        t.parse()
            .ok()
            .and_then(Self::from_years)
            .ok_or_else(|| format!("unknown setting {s:?}; expected 1, 2, 3 or LTC-1..LTC-3"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearlyCount {
    /// 1-based year after the initial commit.
    pub window_index: u32,
    pub dev_commits: u64,
    pub threshold_commits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtcLabel {
    pub setting: Setting,
    pub is_ltc: bool,
    pub duration_days: f64,
    pub yearly_counts: Vec<YearlyCount>,
}

/// Nearest-rank percentile of ascending `sorted`; 0 for an empty slice.
pub fn nearest_rank(sorted: &[u64], p: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Year length and productivity percentile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelRule {
    pub year_days: i64,
    pub percentile: f64,
}

impl Default for LabelRule {
    fn default() -> Self {
        Self {
            year_days: DAYS_PER_YEAR,
            percentile: PERCENTILE,
        }
    }
}

/// Label the developer `author` whose initial commit is at `initial`.
pub fn label_author(
    author: &str,
    initial: DateTime<Utc>,
    project_commits: &[CommitRecord],
    setting: Setting,
) -> LtcLabel {
    label_author_with(author, initial, project_commits, setting, &LabelRule::default())
}

pub fn label_author_with(
    author: &str,
    initial: DateTime<Utc>,
    project_commits: &[CommitRecord],
    setting: Setting,
    rule: &LabelRule,
) -> LtcLabel {
    let own: Vec<i64> = project_commits
        .iter()
        .filter(|c| c.author_name == author)
        .map(CommitRecord::epoch)
        .collect();
    let first = own.iter().min().copied().unwrap_or(initial.timestamp());
    let last = own.iter().max().copied().unwrap_or(first);
    let span = last - first;
    let t = i64::from(setting.years());
    let year = rule.year_days * SECONDS_PER_DAY;
    let long_enough = span > t * year;

    let anchor = initial.timestamp();
    let mut yearly_counts = Vec::new();
    let mut productive = true;
    for k in 1..=t {
        let (lo, hi) = (anchor + (k - 1) * year, anchor + k * year);
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for c in project_commits.iter().filter(|c| (lo..hi).contains(&c.epoch())) {
            *counts.entry(c.author_name.as_str()).or_default() += 1;
        }
        let dev_commits = counts.remove(author).unwrap_or(0);
        let mut others: Vec<u64> = counts.into_values().collect();
        others.sort_unstable();
        let threshold_commits = nearest_rank(&others, rule.percentile);
        productive &= dev_commits > threshold_commits;
        yearly_counts.push(YearlyCount {
            window_index: k as u32,
            dev_commits,
            threshold_commits,
        });
    }
    LtcLabel {
        setting,
        is_ltc: long_enough && productive,
        duration_days: span as f64 / SECONDS_PER_DAY as f64,
        yearly_counts,
    }
}

pub fn label_ltc(pair: &DevProjectPair, project_commits: &[CommitRecord], setting: Setting) -> LtcLabel {
    label_ltc_with(pair, project_commits, setting, &LabelRule::default())
}

pub fn label_ltc_with(
    pair: &DevProjectPair,
    project_commits: &[CommitRecord],
    setting: Setting,
    rule: &LabelRule,
) -> LtcLabel {
    label_author_with(
        &pair.developer.commit_author_name,
        pair.initial_commit.author_time,
        project_commits,
        setting,
        rule,
    )
}

/// Write `labels.csv` rows for labelled pairs.
pub fn write_labels_csv<W: Write>(out: W, rows: &[(&DevProjectPair, &LtcLabel)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["project_id", "developer", "setting", "is_ltc", "duration_days"])?;
    for (pair, label) in rows {
        w.write_record([
            pair.project_id.as_str(),
            pair.developer.account_username.as_str(),
            &label.setting.to_string(),
            if label.is_ltc { "true" } else { "false" },
            &format!("{:.3}", label.duration_days),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DAY: i64 = SECONDS_PER_DAY;

    fn c(author: &str, secs: i64) -> CommitRecord {
        CommitRecord {
            id: format!("{author}-{secs}"),
            author_name: author.into(),
            author_time: DateTime::from_timestamp(secs, 0).unwrap(),
            message: String::new(),
            changed_paths: vec![],
        }
    }

    fn at(secs: i64) -> DateTime<Utc> {
        DateTime::from_timestamp(secs, 0).unwrap()
    }

    #[test]
    fn nearest_rank_percentiles() {
        let v: Vec<u64> = (1..=11).collect();
        assert_eq!(nearest_rank(&v, 10.0), 2);
        assert_eq!(nearest_rank(&[5], 10.0), 5);
        assert_eq!(nearest_rank(&[], 10.0), 0);
        assert_eq!(nearest_rank(&(1..=10).collect::<Vec<_>>(), 10.0), 1);
    }

    #[test]
    fn short_stay_fails_duration() {
        let commits = vec![c("ada", 0), c("ada", 10 * DAY)];
        let l = label_author("ada", at(0), &commits, Setting::Ltc1);
        assert!(!l.is_ltc);
        assert_eq!(l.duration_days, 10.0);
        assert_eq!(l.yearly_counts.len(), 1);
    }

    #[test]
    fn sole_committer_has_zero_threshold() {
        let commits = vec![c("ada", 0), c("ada", 400 * DAY)];
        let l = label_author("ada", at(0), &commits, Setting::Ltc1);
        assert_eq!(l.yearly_counts[0].threshold_commits, 0);
        assert!(l.is_ltc);
    }

    #[test]
    fn eleven_others_give_threshold_two() {
        let mut base = Vec::new();
        for (i, n) in (1..=11).enumerate() {
            for j in 0..n {
                base.push(c(&format!("o{i}"), DAY + j * 60));
            }
        }
        for (own, expect) in [(3, true), (2, false)] {
            let mut commits = base.clone();
            for j in 0..own {
                commits.push(c("dev", j * 100 * DAY));
            }
            commits.push(c("dev", 500 * DAY));
            // the day-500 commit sits outside year one
            let l = label_author("dev", at(0), &commits, Setting::Ltc1);
            assert_eq!(l.yearly_counts[0].threshold_commits, 2);
            assert_eq!(l.yearly_counts[0].dev_commits, own as u64);
            assert_eq!(l.is_ltc, expect, "dev with {own} commits");
        }
    }

    #[test]
    fn setting_parsing() {
        assert_eq!("LTC-2".parse::<Setting>().unwrap(), Setting::Ltc2);
        assert_eq!("3".parse::<Setting>().unwrap(), Setting::Ltc3);
        assert!("4".parse::<Setting>().is_err());
        assert_eq!(serde_json::to_string(&Setting::Ltc1).unwrap(), "\"LTC-1\"");
    }
}
