use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{rng_for, LearnError};

pub const DEFAULT_REPETITIONS: usize = 100;
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    /// Drawn with replacement, size n.
    pub in_sample: Vec<usize>,
    /// Indices never drawn, ascending.
    pub out_of_sample: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapPlan {
    pub n: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub splits: Vec<Split>,
}

fn draw(n: usize, rng: &mut impl Rng) -> Split {
    let in_sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut drawn = vec![false; n];
    for &i in &in_sample {
        drawn[i] = true;
    }
    let out_of_sample = (0..n).filter(|&i| !drawn[i]).collect();
    Split {
        in_sample,
        out_of_sample,
    }
}

fn single_class(labels: &[bool], idx: &[usize]) -> bool {
    let first = labels[idx[0]];
    idx.iter().all(|&i| labels[i] == first)
}

/// Out-of-sample bootstrap splits of `n` rows.
///
/// With `labels`, a split whose in-sample or out-of-sample rows hold a single
/// class is redrawn, as is any split with an empty out-of-sample set.
pub fn bootstrap_plan(
    n: usize,
    repetitions: usize,
    seed: u64,
    labels: Option<&[bool]>,
) -> Result<BootstrapPlan, LearnError> {
    if n < 2 {
        return Err(LearnError::TooFewSamples { n, needed: 2 });
    }
    if let Some(l) = labels {
        assert_eq!(l.len(), n, "labels must cover every row");
    }
    let mut splits = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let mut rng = rng_for(seed, rep as u64);
        let mut tries = 0;
        let split = loop {
            let s = draw(n, &mut rng);
            let ok = !s.out_of_sample.is_empty()
                && labels.map_or(true, |l| !single_class(l, &s.in_sample) && !single_class(l, &s.out_of_sample));
            if ok {
                break s;
            }
            tries += 1;
            if tries >= MAX_REDRAWS {
                return Err(LearnError::DegenerateSplit { repetition: rep });
            }
        };
        splits.push(split);
    }
    Ok(BootstrapPlan {
        n,
        repetitions,
        seed,
        splits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_row_is_rejected() {
        assert!(matches!(bootstrap_plan(1, 10, 0, None), Err(LearnError::TooFewSamples { .. })));
    }

    #[test]
    fn seeded_plans_repeat() {
        let a = bootstrap_plan(50, 20, 9, None).unwrap();
        assert_eq!(a, bootstrap_plan(50, 20, 9, None).unwrap());
        assert_ne!(a, bootstrap_plan(50, 20, 10, None).unwrap());
    }

    #[test]
    fn splits_are_disjoint_and_redrawn_when_degenerate() {
        let labels: Vec<bool> = (0..12).map(|i| i < 2).collect();
        let plan = bootstrap_plan(12, 30, 3, Some(&labels)).unwrap();
        for s in &plan.splits {
            assert_eq!(s.in_sample.len(), 12);
            assert!(s.out_of_sample.iter().all(|i| !s.in_sample.contains(i)));
            assert!(s.in_sample.iter().any(|&i| labels[i]));
            assert!(s.out_of_sample.iter().any(|&i| labels[i]));
        }
    }

    #[test]
    fn impossible_labels_give_degenerate_split() {
        let labels = [true, true];
        assert!(matches!(
            bootstrap_plan(2, 1, 0, Some(&labels)),
            Err(LearnError::DegenerateSplit { .. })
        ));
    }
}
