use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cite_orch::cohort::EligibilityConfig;
use cite_orch::metrics::{CountingRules, MetricsConfig, DEFAULT_A50_THRESHOLD};
use cite_orch::pipeline::{
    default_tails, ingest, load_tails, run_pipeline, write_detection, FileCounts, InputPaths, Manifest, PipelineError,
    RunConfig, DEFAULT_EXCLUDED_FIELD,
};
use cite_orch::synth::{evaluate_detection, generate, write_corpus, GroundTruth, SynthConfig};
use cite_orch::value::Percent;

#[derive(Parser)]
#[command(name = "cite-orch", version, about = "Citation-orchestration indicators over publication corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and index the inputs, then print row and drop counts as JSON.
    IngestCheck(InputArgs),
    /// Compute metrics, tails, enrichment, histograms and co-occurrence.
    Run(RunArgs),
    /// Write a synthetic corpus with planted motifs and its ground truth.
    Synth(SynthArgs),
    /// Score a run's tails against a synthetic ground truth.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Directory holding papers.csv, authorships.csv, citations.csv and
    /// taxonomy.csv; individual paths override it.
    #[arg(long)]
    input_dir: Option<PathBuf>,
    #[arg(long)]
    papers: Option<PathBuf>,
    #[arg(long)]
    authorships: Option<PathBuf>,
    #[arg(long)]
    citations: Option<PathBuf>,
    #[arg(long)]
    taxonomy: Option<PathBuf>,
}

impl InputArgs {
    fn paths(&self) -> Result<InputPaths, PipelineError> {
        let base = self.input_dir.as_deref().map(InputPaths::in_dir);
        let pick = |given: &Option<PathBuf>, from_dir: Option<&PathBuf>, flag: &str| {
            given
                .clone()
                .or_else(|| from_dir.cloned())
                .ok_or_else(|| PipelineError::Config(format!("--{flag} is required (or give --input-dir)")))
        };
        Ok(InputPaths {
            papers: pick(&self.papers, base.as_ref().map(|b| &b.papers), "papers")?,
            authorships: pick(&self.authorships, base.as_ref().map(|b| &b.authorships), "authorships")?,
            citations: pick(&self.citations, base.as_ref().map(|b| &b.citations), "citations")?,
            taxonomy: pick(&self.taxonomy, base.as_ref().map(|b| &b.taxonomy), "taxonomy")?,
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    inputs: InputArgs,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Authors need strictly more full papers than this.
    #[arg(long, default_value_t = 5)]
    min_papers: u32,
    #[arg(long, default_value_t = 1000)]
    min_citations: u64,
    /// Seed for field-assignment tie-breaks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Field id or name excluded from the A50%C and A50 tails (repeatable).
    #[arg(long = "exclude-field")]
    exclude_field: Vec<String>,
    /// Keep every field in every tail.
    #[arg(long, conflicts_with = "exclude_field")]
    no_exclude: bool,
    /// Tail percentile.
    #[arg(long, default_value = "1")]
    pct: Percent,
    /// Shared full papers a co-author needs to exceed to count toward A50.
    #[arg(long, default_value_t = DEFAULT_A50_THRESHOLD)]
    a50_threshold: u32,
    /// Count only citations from full papers.
    #[arg(long)]
    citing_full_only: bool,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Re-run exactly the configuration recorded in a manifest.json.
    #[arg(long, conflicts_with_all = ["input_dir", "papers", "authorships", "citations", "taxonomy"])]
    from_manifest: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, PipelineError> {
        if let Some(path) = &self.from_manifest {
            let mut cfg = Manifest::load(path)?.config;
            if let Some(out) = &self.out {
                cfg.out_dir = out.clone();
            }
            return Ok(cfg);
        }
        let out = self.out.clone().ok_or_else(|| PipelineError::Config("--out is required".into()))?;
        let mut cfg = RunConfig::new(self.inputs.paths()?, out);
        cfg.eligibility =
            EligibilityConfig { min_full_papers: self.min_papers, min_citations: self.min_citations, seed: self.seed };
        cfg.metrics = MetricsConfig {
            rules: CountingRules { citing_full_only: self.citing_full_only, ..CountingRules::default() },
            a50_threshold: self.a50_threshold,
        };
        let excluded = if self.no_exclude {
            Vec::new()
        } else if self.exclude_field.is_empty() {
            vec![DEFAULT_EXCLUDED_FIELD.to_string()]
        } else {
            self.exclude_field.clone()
        };
        cfg.tails = default_tails(self.pct, &excluded);
        Ok(cfg)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON file with a full generator configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    authors: Option<u32>,
    #[arg(long)]
    self_citers: Option<u32>,
    #[arg(long)]
    cartels: Option<u32>,
    #[arg(long)]
    cartel_size: Option<u32>,
    #[arg(long)]
    hyperteams: Option<u32>,
    #[arg(long)]
    team_size: Option<u32>,
    #[arg(long)]
    joint_papers: Option<u32>,
}

impl SynthArgs {
    fn config(&self) -> Result<SynthConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let bad = |message: String| PipelineError::Manifest { path: path.display().to_string(), message };
                let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
                serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?
            }
            None => SynthConfig::default(),
        };
        cfg.seed = self.seed;
        let set = |slot: &mut u32, v: Option<u32>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.n_background_authors, self.authors);
        set(&mut cfg.n_self_citers, self.self_citers);
        set(&mut cfg.n_cartels, self.cartels);
        set(&mut cfg.cartel_size, self.cartel_size);
        set(&mut cfg.n_hyperteams, self.hyperteams);
        set(&mut cfg.team_size, self.team_size);
        set(&mut cfg.joint_papers, self.joint_papers);
        Ok(cfg)
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// truth.csv written by `synth`.
    #[arg(long)]
    truth: PathBuf,
    /// Output directory of a `run`.
    #[arg(long)]
    run: PathBuf,
    /// Write the scores here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

fn ingest_summary(paths: &InputPaths) -> Result<serde_json::Value, PipelineError> {
    let ingested = ingest(paths)?;
    let files: BTreeMap<_, FileCounts> = ingested.files.iter().map(|(k, v)| (k.clone(), v.into())).collect();
    Ok(serde_json::json!({
        "files": files,
        "index": ingested.index.report(),
        "authors": ingested.index.author_count(),
    }))
}

fn error_line(e: &PipelineError) -> String {
    format!("error[{}] {}", e.kind(), e.to_string().replace('\n', " "))
}

fn execute(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::IngestCheck(args) => println!("{}", to_json(&ingest_summary(&args.paths()?)?)),
        Command::Run(args) => {
            let cfg = args.config()?;
            let out = run_pipeline(&cfg, args.threads)?;
            eprintln!(
                "{} eligible of {} authors; reports in {}",
                out.manifest.cohort.eligible,
                out.manifest.cohort.authors,
                cfg.out_dir.display()
            );
        }
        Command::Synth(args) => {
            let cfg = args.config()?;
            let corpus = generate(&cfg)?;
            write_corpus(&corpus, &args.out)?;
            let path = args.out.join("synth_config.json");
            std::fs::write(&path, to_json(&cfg) + "\n")
                .map_err(|source| PipelineError::Output { path: path.display().to_string(), source })?;
            eprintln!(
                "{} papers, {} authorships, {} citations written to {}",
                corpus.papers.len(),
                corpus.authorships.len(),
                corpus.citations.len(),
                args.out.display()
            );
        }
        Command::Evaluate(args) => {
            let truth = GroundTruth::read_csv(&args.truth)?;
            let scores = evaluate_detection(&truth, &load_tails(&args.run)?);
            let csv_err = |path: &Path, e: csv::Error| PipelineError::Output {
                path: path.display().to_string(),
                source: io::Error::other(e.to_string()),
            };
            match &args.out {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .map_err(|source| PipelineError::Output { path: path.display().to_string(), source })?;
                    write_detection(&scores, file).map_err(|e| csv_err(path, e))?;
                }
                None => write_detection(&scores, io::stdout().lock()).map_err(|e| csv_err(Path::new("<stdout>"), e))?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(io::stderr(), "{}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
