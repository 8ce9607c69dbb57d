//! Generate a synthetic corpus with planted long-time contributors.
//!
//! ```text
//! cargo run --example synth_corpus -- out/corpus [seed] [devs]
//! ```

use std::path::PathBuf;

use kultc::labeling::Setting;
use kultc::pipeline::{synth_corpus, SynthParams};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "synth-corpus".into()));
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let devs = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);

    let summary = synth_corpus(&SynthParams::new(seed, 4, devs, 0.3), &out)?;
    println!("{} projects, {} developers under {}", summary.projects.len(), summary.devs.len(), out.display());
    for s in Setting::ALL {
        let n = summary.devs.iter().filter(|d| d.expected(s)).count();
        println!("  {s}: {n} planted LTCs");
    }
    println!("run it with: kultc run-all --config {}", out.join("kultc.toml").display());
    Ok(())
}
