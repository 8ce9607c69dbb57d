use std::io::{Read, Write};

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;

use super::{auc, bootstrap_plan, grid_search, rng_for, train, BootstrapPlan, Dataset, GridSpec, LearnError, Params};

/// How a model's hyper-parameters are chosen in each repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Learner {
    Fixed(Params),
    /// Grid search on each in-sample set.
    Tuned(GridSpec),
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub data: Dataset,
    pub learner: Learner,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, data: Dataset, learner: Learner) -> Self {
        Self {
            name: name.into(),
            data,
            learner,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucRow {
    pub model: String,
    pub repetition: usize,
    pub auc: f64,
}

/// Out-of-sample AUCs, one row per model and repetition.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AucTable {
    pub rows: Vec<AucRow>,
}

impl AucTable {
    /// Model names in first-appearance order.
    pub fn models(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.model) {
                out.push(r.model.clone());
            }
        }
        out
    }

    /// AUCs of `model` ordered by repetition.
    pub fn aucs(&self, model: &str) -> Vec<f64> {
        let mut rows: Vec<&AucRow> = self.rows.iter().filter(|r| r.model == model).collect();
        rows.sort_by_key(|r| r.repetition);
        rows.iter().map(|r| r.auc).collect()
    }

    pub fn median(&self, model: &str) -> Option<f64> {
        let mut v = self.aucs(model);
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
    }

    pub fn write_csv(&self, w: impl Write) -> Result<(), LearnError> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        wr.write_record(["model", "repetition", "auc"])?;
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self, LearnError> {
        let rows = csv::Reader::from_reader(r)
            .deserialize()
            .collect::<Result<Vec<AucRow>, _>>()?;
        Ok(Self { rows })
    }
}

/// Training seed of repetition `rep`; shared by every model.
pub fn repetition_seed(seed: u64, rep: usize) -> u64 {
    rng_for(seed, (1 << 32) | rep as u64).next_u64()
}

fn check_paired(specs: &[ModelSpec], plan: &BootstrapPlan) -> Result<(), LearnError> {
    let Some(first) = specs.first() else {
        return Ok(());
    };
    for s in specs {
        if s.data.n() != plan.n {
            return Err(LearnError::MismatchedData(format!(
                "{} has {} rows, plan covers {}",
                s.name,
                s.data.n(),
                plan.n
            )));
        }
        if s.data.y != first.data.y {
            return Err(LearnError::MismatchedData(format!("{} labels differ from {}", s.name, first.name)));
        }
    }
    Ok(())
}

fn one(spec: &ModelSpec, plan: &BootstrapPlan, rep: usize) -> Result<f64, LearnError> {
    let split = &plan.splits[rep];
    let seed = repetition_seed(plan.seed, rep);
    let train_data = spec.data.rows(&split.in_sample);
    let params = match &spec.learner {
        Learner::Fixed(p) => p.clone(),
        Learner::Tuned(grid) => grid_search(grid, &train_data, seed)?.best,
    };
    let model = train(&params, &train_data, seed)?;
    let test = spec.data.rows(&split.out_of_sample);
    auc(&model.predict_batch(&test.x), &test.y)
}

/// Trains and scores every model on every split of `plan`. The i-th AUC of
/// each model comes from the same split and training seed.
pub fn run_experiment(specs: &[ModelSpec], plan: &BootstrapPlan) -> Result<AucTable, LearnError> {
    check_paired(specs, plan)?;
    let mut rows = Vec::with_capacity(specs.len() * plan.splits.len());
    for spec in specs {
        let aucs = (0..plan.splits.len())
            .into_par_iter()
            .map(|rep| one(spec, plan, rep))
            .collect::<Result<Vec<f64>, _>>()?;
        log::info!("{}: {} repetitions", spec.name, aucs.len());
        rows.extend(aucs.into_iter().enumerate().map(|(repetition, auc)| AucRow {
            model: spec.name.clone(),
            repetition,
            auc,
        }));
    }
    Ok(AucTable { rows })
}

/// Null-model control: each repetition shuffles the labels afresh, draws
/// its own bootstrap split of the shuffled data and scores `spec` on it.
pub fn permutation_control(spec: &ModelSpec, repetitions: usize, seed: u64) -> Result<AucTable, LearnError> {
    let aucs = (0..repetitions)
        .into_par_iter()
        .map(|rep| {
            let mut y = spec.data.y.clone();
            y.shuffle(&mut rng_for(seed, (2 << 32) | rep as u64));
            let plan = bootstrap_plan(y.len(), 1, repetition_seed(seed, rep), Some(&y))?;
            let shuffled = ModelSpec::new(spec.name.clone(), spec.data.with_labels(y), spec.learner.clone());
            one(&shuffled, &plan, 0)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(AucTable {
        rows: aucs
            .into_iter()
            .enumerate()
            .map(|(repetition, auc)| AucRow {
                model: spec.name.clone(),
                repetition,
                auc,
            })
            .collect(),
    })
}
