//! Paired comparison of two AUC distributions and a Scott-Knott ESD ranking.

use kultc::analysis::{cliffs_delta, mean_normalized_improvement, scott_knott_esd, wilcoxon_signed_rank};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut draw = |centre: f64| -> Vec<f64> { (0..100).map(|_| centre + rng.gen_range(-0.04..0.04)).collect() };
    let treatments = vec![
        ("kultc".to_string(), draw(0.81)),
        ("combined".to_string(), draw(0.82)),
        ("baseline".to_string(), draw(0.75)),
        ("permuted".to_string(), draw(0.50)),
    ];

    let (model, base) = (&treatments[0].1, &treatments[2].1);
    let effect = cliffs_delta(model, base)?;
    println!("kultc vs baseline");
    println!("  Wilcoxon p        {:.3e}", wilcoxon_signed_rank(model, base)?);
    println!("  Cliff's delta     {:.3} ({:?})", effect.d, effect.magnitude);
    println!("  AUC improvement   {:.2} %", mean_normalized_improvement(model, base)?);

    println!("\nranks");
    for e in scott_knott_esd(&treatments, &Default::default()).entries {
        println!("  {} {:<9} median {:.3}", e.rank, e.treatment, e.median);
    }
    Ok(())
}
