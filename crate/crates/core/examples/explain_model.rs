//! SHAP attributions for a random forest, summed per feature group and
//! ranked.

use std::collections::BTreeMap;

use kultc::analysis::{dimension_importance, explain, tree_shap};
use kultc::learn::{train, Dataset, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 300;
    let columns: Vec<String> = ["DEV_K1", "DEV_K2", "PROJ_K1", "PROJ_K2"].map(String::from).to_vec();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let row: Vec<f64> = (0..4).map(|_| rng.gen()).collect();
        y.push(row[0] + 0.5 * row[1] + 0.1 * rng.gen::<f64>() > 0.9);
        x.push(row);
    }
    let data = Dataset::new(columns, x, y);
    let model = train(&Params::Rf { n_estimators: 100, max_depth: None }, &data, 1)?;

    let (phi, base) = tree_shap(&model, &data.x[0])?;
    println!("record 0: base {base:.3} + {phi:.3?} = {:.3}", model.predict_proba(&data.x[0]));

    let shap = explain(&model, &data, &data, 1)?;
    let groups = BTreeMap::from([
        ("DEV".to_string(), vec!["DEV_K1".to_string(), "DEV_K2".to_string()]),
        ("PROJ".to_string(), vec!["PROJ_K1".to_string(), "PROJ_K2".to_string()]),
    ]);
    let importance = dimension_importance(&shap, &groups, &Default::default())?;
    for e in importance.ranks.entries {
        println!("rank {} {:<5} median |phi| sum {:.3}", e.rank, e.treatment, e.median);
    }
    Ok(())
}
