//! Out-of-sample bootstrap evaluation of several learners, with a
//! shuffled-label control.

use kultc::learn::{bootstrap_plan, permutation_control, run_experiment, Dataset, Learner, ModelKind, ModelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 240;
    let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
    let x = y
        .iter()
        .map(|&l| {
            let shift = if l { 0.8 } else { 0.0 };
            vec![shift + rng.gen::<f64>(), 0.5 * shift + rng.gen::<f64>(), rng.gen()]
        })
        .collect();
    let data = Dataset::new(vec!["signal".into(), "weak".into(), "noise".into()], x, y);

    let plan = bootstrap_plan(data.n(), 30, 11, Some(&data.y))?;
    let specs: Vec<ModelSpec> = [ModelKind::Rf, ModelKind::Nb, ModelKind::Knn, ModelKind::Xgb]
        .into_iter()
        .map(|k| ModelSpec::new(k.name(), data.clone(), Learner::Fixed(k.default_params())))
        .collect();
    let mut table = run_experiment(&specs, &plan)?;
    let control = permutation_control(&ModelSpec::new("permuted", data, Learner::Fixed(ModelKind::Rf.default_params())), 30, 12)?;
    table.rows.extend(control.rows);

    for m in table.models() {
        println!("{m:<10} median AUC {:.3}", table.median(&m).unwrap());
    }
    Ok(())
}
