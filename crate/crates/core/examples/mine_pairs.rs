//! Load commit bundles, link authors to accounts and build
//! developer/project pairs.
//!
//! ```text
//! cargo run --example mine_pairs -- path/to/corpus
//! ```
//!
//! The corpus directory holds `repos/*.json` and `profiles.json`; without an
//! argument a small synthetic corpus is generated first.

use std::path::PathBuf;

use kultc::features::{Corpus, ProjectData};
use kultc::mining::{link_identities, load_profiles, open_repository, OpenOptions};
use kultc::pipeline::{synth_corpus, SynthParams};

fn main() -> anyhow::Result<()> {
    let tmp = tempfile::tempdir()?;
    let dir = match std::env::args().nth(1) {
        Some(d) => PathBuf::from(d),
        None => {
            synth_corpus(&SynthParams::new(3, 2, 12, 0.4), tmp.path())?;
            tmp.path().to_path_buf()
        }
    };

    let profiles = load_profiles(&dir.join("profiles.json"))?;
    let mut repos: Vec<PathBuf> = std::fs::read_dir(dir.join("repos"))?.map(|e| Ok(e?.path())).collect::<anyhow::Result<_>>()?;
    repos.sort();

    let mut corpus = Corpus::default();
    for path in &repos {
        let repo = open_repository(path, &OpenOptions::default())?;
        let mut project = ProjectData::new(repo, None, Vec::new())?;
        project.links = link_identities(project.commits.iter().map(|c| c.author_name.as_str()), &profiles);
        println!("{}: {} commits, {} linked developers", project.id(), project.commits.len(), project.links.len());
        corpus.insert(project);
    }

    let pairs = corpus.pairs();
    println!("\n{} pairs", pairs.len());
    for p in pairs.iter().take(8) {
        println!(
            "  {:<8} {:<10} joined {}  previous {:?}",
            p.project_id,
            p.developer.account_username,
            p.initial_commit.author_time.date_naive(),
            p.previous_projects
        );
    }
    Ok(())
}
