//! Compute the five KU feature dimensions for every developer/project pair.
//!
//! ```text
//! cargo run --example feature_matrix -- [matrix.csv]
//! ```

use std::path::Path;

use kultc::features::{assemble_matrix, Corpus, Dimension, FeatureExtractor, ProjectData};
use kultc::ku::Detector;
use kultc::mining::{link_identities, load_pr_bundle, load_profiles, open_repository, OpenOptions};
use kultc::pipeline::{synth_corpus, SynthParams};

fn load(dir: &Path) -> anyhow::Result<Corpus> {
    let profiles = load_profiles(&dir.join("profiles.json"))?;
    let mut corpus = Corpus::default();
    for (sub, context) in [("repos", false), ("context", true)] {
        let mut paths: Vec<_> = std::fs::read_dir(dir.join(sub))?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
        paths.sort();
        for path in paths {
            let repo = open_repository(&path, &OpenOptions::default())?;
            let prs = dir.join("prs").join(format!("{}.json", repo.project_id()));
            let prs = if context { None } else { Some(load_pr_bundle(&prs)?) };
            let mut project = ProjectData::new(repo, prs, Vec::new())?;
            project.links = link_identities(project.commits.iter().map(|c| c.author_name.as_str()), &profiles);
            if context {
                corpus.insert_context(project);
            } else {
                corpus.insert(project);
            }
        }
    }
    Ok(corpus)
}

fn main() -> anyhow::Result<()> {
    let tmp = tempfile::tempdir()?;
    synth_corpus(&SynthParams::new(5, 2, 20, 0.4), tmp.path())?;
    let corpus = load(tmp.path())?;

    let extractor = FeatureExtractor::new(Detector::with_default_rules());
    let pairs = corpus.pairs();
    let rows = extractor.rows(&pairs, &corpus);
    let matrix = assemble_matrix(rows, &Default::default())?;
    println!("{} rows x {} columns", matrix.n_rows(), matrix.n_columns());

    print!("{:<10} {:<10}", "project", "developer");
    for d in Dimension::ALL {
        print!(" {:>11}", d.to_string());
    }
    println!();
    for r in matrix.rows.iter().take(10) {
        print!("{:<10} {:<10}", r.key.project_id, r.key.developer);
        for d in Dimension::ALL {
            let total: f64 = matrix.dimension_map[&d].iter().map(|&j| r.values[j]).sum();
            print!(" {total:>11.1}");
        }
        println!();
    }

    if let Some(out) = std::env::args().nth(1) {
        matrix.write_csv(std::fs::File::create(&out)?)?;
        println!("wrote {out}");
    }
    Ok(())
}
