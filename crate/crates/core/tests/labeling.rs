use chrono::DateTime;
use kultc::labeling::{label_author, Setting};
use kultc::mining::CommitRecord;
use proptest::prelude::*;

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

/// The developer "dev" joins on day 0; others commit on arbitrary days.
fn history() -> impl Strategy<Value = Vec<CommitRecord>> {
    (
        prop::collection::vec(0i64..1400, 1..40),
        prop::collection::vec((0u8..8, 0i64..1400), 0..120),
    )
        .prop_map(|(dev_days, others)| {
            let mut out = vec![commit("dev", 0, 0)];
            out.extend(dev_days.into_iter().enumerate().map(|(i, d)| commit("dev", d, i + 1)));
            out.extend(others.into_iter().enumerate().map(|(i, (a, d))| commit(&format!("o{a}"), d, i)));
            out
        })
}

fn label(commits: &[CommitRecord], s: Setting) -> bool {
    label_author("dev", DateTime::from_timestamp(0, 0).unwrap(), commits, s).is_ltc
}

proptest! {
    #[test]
    fn longer_settings_imply_shorter(commits in history()) {
        let l: Vec<bool> = Setting::ALL.iter().map(|s| label(&commits, *s)).collect();
        prop_assert!(!l[2] || l[1]);
        prop_assert!(!l[1] || l[0]);
    }

    #[test]
    fn labels_ignore_commit_order(commits in history(), seed in any::<u64>()) {
        let mut shuffled = commits.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize);
        }
        for s in Setting::ALL {
            let a = label_author("dev", DateTime::from_timestamp(0, 0).unwrap(), &commits, s);
            let b = label_author("dev", DateTime::from_timestamp(0, 0).unwrap(), &shuffled, s);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn more_dev_commits_never_revoke(commits in history(), extra in prop::collection::vec(0i64..1400, 1..10)) {
        let mut grown = commits.clone();
        grown.extend(extra.iter().enumerate().map(|(i, d)| commit("dev", *d, 1000 + i)));
        for s in Setting::ALL {
            prop_assert!(!label(&commits, s) || label(&grown, s));
        }
    }

    #[test]
    fn yearly_counts_have_one_entry_per_year(commits in history()) {
        for s in Setting::ALL {
            let l = label_author("dev", DateTime::from_timestamp(0, 0).unwrap(), &commits, s);
            prop_assert_eq!(l.yearly_counts.len() as u32, s.years());
        }
    }
}
