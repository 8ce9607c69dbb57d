//! Generate a synthetic corpus and run every pipeline stage on it.
//!
//! ```text
//! cargo run --release --example run_all -- [run-dir]
//! ```

use std::path::PathBuf;

use kultc::pipeline::{run_pipeline, synth_corpus, RunConfig, SynthParams};

fn main() -> anyhow::Result<()> {
    let corpus = tempfile::tempdir()?;
    synth_corpus(&SynthParams::new(7, 2, 80, 0.3), corpus.path())?;
    let mut cfg = RunConfig::load(&corpus.path().join("kultc.toml"))?;
    cfg.evaluation.repetitions = 20;

    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| corpus.path().join("run"));
    let manifest = run_pipeline(&cfg, Some(&out))?;
    for (stage, rec) in &manifest.stages {
        println!("{stage:<9} {} outputs", rec.outputs.len());
    }
    for w in &manifest.warnings {
        println!("warning: {w}");
    }
    println!("\n{}", std::fs::read_to_string(out.join("report.md"))?);
    Ok(())
}
