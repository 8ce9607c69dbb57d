//! Label a developer as a long-time contributor.
//!
//! Eleven other developers commit 1..=11 times in the first year, so the
//! 10th percentile threshold is 2 commits. A developer with 3 commits in that
//! year who stays past day 365 is an LTC-1; one with 2 commits is not.

use chrono::DateTime;
use kultc::labeling::{label_author, nearest_rank, Setting};
use kultc::mining::CommitRecord;

const DAY: i64 = 86_400;

fn commit(author: &str, day: i64, i: usize) -> CommitRecord {
    CommitRecord {
        id: format!("{author}-{i}"),
        author_name: author.into(),
        author_time: DateTime::from_timestamp(day * DAY, 0).unwrap(),
        message: String::new(),
        changed_paths: vec![],
    }
}

fn history(first_year_commits: usize) -> Vec<CommitRecord> {
    let mut commits = Vec::new();
    for k in 1..=11 {
        commits.extend((0..k).map(|i| commit(&format!("other{k}"), 1 + i as i64, i)));
    }
    commits.extend((0..first_year_commits).map(|i| commit("dev", 100 * i as i64, i)));
    commits.push(commit("dev", 400, 99));
    commits
}

fn main() {
    let others: Vec<u64> = (1..=11).collect();
    println!("10th percentile of {others:?} = {}", nearest_rank(&others, 10.0));

    let joined = DateTime::from_timestamp(0, 0).unwrap();
    for n in [3, 2] {
        let commits = history(n);
        for s in Setting::ALL {
            let l = label_author("dev", joined, &commits, s);
            let years: Vec<String> = l
                .yearly_counts
                .iter()
                .map(|y| format!("y{}: {} > {}", y.window_index, y.dev_commits, y.threshold_commits))
                .collect();
            println!(
                "{n} first-year commits, {s}: ltc={} stayed {:.0} days [{}]",
                l.is_ltc,
                l.duration_days,
                years.join(", ")
            );
        }
    }
}
