use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use kultc::features::FeatureMatrix;
use kultc::ku::{Detector, KuVector, Ruleset};
use kultc::learn::AucTable;
use kultc::pipeline::{
    compare_aucs, detect_tree, explain_model, run_pipeline, synth_corpus, PipelineError, Run, RunConfig, SavedModel,
    Stage, SynthParams,
};

#[derive(Parser)]
#[command(name = "kultc", version, about = "Knowledge-unit mining and long-time-contributor prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Run directory; defaults to the configured output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load repositories and build developer/project pairs.
    Mine(RunArgs),
    /// Count KUs in Java files, or in the head of every studied project.
    Detect {
        #[arg(long, short, conflicts_with = "path")]
        config: Option<PathBuf>,
        /// A Java file or a directory searched recursively.
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        ruleset: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the KU feature matrix.
    Features(RunArgs),
    /// Label pairs under every configured setting.
    Label(RunArgs),
    /// Remove correlated and collinear features.
    Select(RunArgs),
    /// Fit one model per setting and learner on all labelled pairs.
    Train(RunArgs),
    /// Out-of-sample bootstrap evaluation.
    Evaluate(RunArgs),
    /// Paired tests, effect sizes and model ranks.
    Compare {
        #[arg(long, short, conflicts_with = "aucs")]
        config: Option<PathBuf>,
        /// AUC table to compare instead of a run directory.
        #[arg(long, requires = "pairs")]
        aucs: Option<PathBuf>,
        /// `model:baseline` pairs of full model names.
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SHAP attributions and dimension importance.
    Explain {
        #[arg(long, short, conflicts_with = "model")]
        config: Option<PathBuf>,
        /// Saved model JSON written by `train`.
        #[arg(long, requires = "matrix")]
        model: Option<PathBuf>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Markdown and JSON summary of a run directory.
    Report(RunArgs),
    /// Generate a synthetic corpus with planted LTCs.
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        projects: usize,
        #[arg(long, default_value_t = 200)]
        devs: usize,
        #[arg(long, default_value_t = 0.3)]
        ltc_fraction: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Every stage in order.
    RunAll(RunArgs),
}

enum Failure {
    Config(String),
    Stage(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e.exit_code() {
            2 => Failure::Config(e.to_string()),
            _ => Failure::Stage(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Stage(format!("{e:#}"))
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    RunConfig::load(path).map_err(|e| Failure::Config(e.to_string()))
}

fn stage(args: &RunArgs, stage: Stage) -> Result<(), Failure> {
    let cfg = load(&args.config)?;
    let mut run = Run::open(&cfg, args.out.as_deref())?;
    run.execute(stage)?;
    println!("{stage}: wrote {}", run.dir().display());
    Ok(())
}

fn sink(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn detect_files(path: &Path, ruleset: Option<&Path>, out: Option<&Path>) -> Result<(), Failure> {
    let detector = match ruleset {
        Some(r) => Detector::new(Ruleset::load(r).map_err(|e| Failure::Config(e.to_string()))?),
        None => Detector::with_default_rules(),
    };
    let rows = detect_tree(path, &detector)?;
    let mut w = csv::Writer::from_writer(sink(out)?);
    let mut header = vec!["path".to_string()];
    header.extend(KuVector::header());
    w.write_record(&header).map_err(anyhow::Error::from)?;
    for (p, v) in rows {
        let mut rec = vec![p];
        rec.extend(v.to_record());
        w.write_record(&rec).map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

fn compare_files(aucs: &Path, pairs: &[String], out: Option<&Path>) -> Result<(), Failure> {
    let table = AucTable::read_csv(std::fs::File::open(aucs).with_context(|| format!("opening {}", aucs.display()))?)
        .map_err(anyhow::Error::from)?;
    let pairs = pairs
        .iter()
        .map(|p| {
            p.split_once(':')
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .ok_or_else(|| Failure::Config(format!("pair {p:?} is not model:baseline")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let stats = compare_aucs(&table, &pairs, &Default::default())?;
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &stats).map_err(anyhow::Error::from)?;
    writeln!(w).map_err(anyhow::Error::from)?;
    Ok(())
}

fn explain_files(model: &Path, matrix: &Path, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let saved: SavedModel = serde_json::from_slice(&std::fs::read(model).with_context(|| format!("reading {}", model.display()))?)
        .map_err(anyhow::Error::from)?;
    let m = FeatureMatrix::read_csv(std::fs::File::open(matrix).with_context(|| format!("opening {}", matrix.display()))?)
        .map_err(anyhow::Error::from)?;
    let m = m.select_columns(&saved.columns).map_err(anyhow::Error::from)?;
    let data = kultc::learn::Dataset::new(
        m.column_names.clone(),
        m.rows.iter().map(|r| r.values.clone()).collect(),
        vec![false; m.n_rows()],
    );
    let (shap, importance) = explain_model(&saved.model, &data, seed, &Default::default())?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(anyhow::Error::from)?;
    shap.write_csv(std::fs::File::create(dir.join("shap.csv")).map_err(anyhow::Error::from)?)
        .map_err(anyhow::Error::from)?;
    let ranks = serde_json::json!({ "version": kultc::pipeline::OUTPUT_VERSION, "ranks": importance.ranks });
    std::fs::write(dir.join("ranks.json"), serde_json::to_string_pretty(&ranks).unwrap() + "\n").map_err(anyhow::Error::from)?;
    println!("explain: wrote {}", dir.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Mine(a) => stage(&a, Stage::Mine),
        Command::Features(a) => stage(&a, Stage::Features),
        Command::Label(a) => stage(&a, Stage::Label),
        Command::Select(a) => stage(&a, Stage::Select),
        Command::Train(a) => stage(&a, Stage::Train),
        Command::Evaluate(a) => stage(&a, Stage::Evaluate),
        Command::Report(a) => stage(&a, Stage::Report),
        Command::Detect {
            config,
            path,
            ruleset,
            out,
        } => match (config, path) {
            (_, Some(p)) => detect_files(&p, ruleset.as_deref(), out.as_deref()),
            (Some(c), None) => stage(&RunArgs { config: c, out }, Stage::Detect),
            (None, None) => Err(Failure::Config("detect needs --config or --path".into())),
        },
        Command::Compare {
            config,
            aucs,
            pairs,
            out,
        } => match (config, aucs) {
            (_, Some(a)) => compare_files(&a, &pairs, out.as_deref()),
            (Some(c), None) => stage(&RunArgs { config: c, out }, Stage::Compare),
            (None, None) => Err(Failure::Config("compare needs --config or --aucs".into())),
        },
        Command::Explain {
            config,
            model,
            matrix,
            seed,
            out,
        } => match (config, model, matrix) {
            (_, Some(m), Some(x)) => explain_files(&m, &x, seed, out.as_deref()),
            (Some(c), _, _) => stage(&RunArgs { config: c, out }, Stage::Explain),
            _ => Err(Failure::Config("explain needs --config or --model with --matrix".into())),
        },
        Command::Synth {
            seed,
            projects,
            devs,
            ltc_fraction,
            out,
        } => {
            let summary = synth_corpus(&SynthParams::new(seed, projects, devs, ltc_fraction), &out).map_err(|e| match e {
                kultc::pipeline::SynthError::InvalidParams(m) => Failure::Config(m),
                other => Failure::Stage(other.to_string()),
            })?;
            println!(
                "synth: {} developers ({} planted LTCs) in {} projects under {}",
                summary.devs.len(),
                summary.planted_ltcs(),
                summary.projects.len(),
                out.display()
            );
            Ok(())
        }
        Command::RunAll(a) => {
            let cfg = load(&a.config)?;
            let manifest = run_pipeline(&cfg, a.out.as_deref())?;
            let dir = a.out.unwrap_or_else(|| cfg.output_path());
            println!("run-all: {} stages, {} warnings, wrote {}", manifest.stages.len(), manifest.warnings.len(), dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Stage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
