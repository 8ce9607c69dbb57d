//! Remove correlated and collinear columns with AutoSpearman.

use kultc::learn::{autospearman, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 300;
    let a: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let a_noisy: Vec<f64> = a.iter().map(|v| v + 0.05 * rng.gen::<f64>()).collect();
    let total: Vec<f64> = (0..n).map(|i| a[i] + b[i] + c[i]).collect();
    let cols = [("a", &a), ("b", &b), ("c", &c), ("a_noisy", &a_noisy), ("a_plus_b_plus_c", &total)];

    let x = (0..n).map(|i| cols.iter().map(|(_, v)| v[i]).collect()).collect();
    let y = (0..n).map(|i| a[i] > 0.5).collect();
    let data = Dataset::new(cols.iter().map(|(name, _)| name.to_string()).collect(), x, y);

    let r = autospearman(&data, 0.7, 5.0);
    println!("kept: {:?}", r.kept_columns);
    for (col, why) in &r.dropped {
        println!("dropped {col}: {why:?}");
    }
}
