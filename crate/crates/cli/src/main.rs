//! `recomb`: run the board service, or drive the pipelines and the
//! evaluation harness from the shell. Every command writes JSON to stdout
//! (or to `--out`); logs go to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use recomb_core::layout::vary_arrangement;
use recomb_core::{Arrangement, BlobSink, KeywordSet, MemoryBlobs, VariatorParams};
use recomb_eval::{EvalParams, Evaluator, Manifest, DEFAULT_MATCH_THRESHOLD};
use recomb_pipeline::Orchestrator;
use recomb_providers::ProviderBundle;
use recomb_service::{FileBlobs, ServiceConfig};
use serde::Deserialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "recomb", version, about = "Reference recombination engine for design ideation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Provider bundle: "stub", "env", or a bundle TOML file.
    #[arg(long, default_value = "stub")]
    bundle: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the REST API.
    Serve {
        /// Service TOML; defaults apply without one.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Extract keywords and an arrangement from a reference image.
    Extract {
        image: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Merge keywords into three drafts with sketches.
    Merge {
        /// JSON with `subject_matter`, `action_pose`, `theme_mood` lists and
        /// an optional `arrangement`.
        #[arg(long)]
        keywords_file: PathBuf,
        /// Directory for sketch images, named by SHA-256.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Further sketches to add to every draft.
        #[arg(long, default_value_t = 0)]
        more_sketches: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run an evaluation over an annotated manifest.
    Eval {
        kind: EvalCommand,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "stub")]
        bundle: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MATCH_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 100)]
        n_sets: usize,
    },
    /// Layout utilities.
    Layout {
        #[command(subcommand)]
        command: LayoutCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalCommand {
    Keywords,
    Recommend,
    Diversity,
}

#[derive(Subcommand)]
enum LayoutCommand {
    /// Rank jittered variations of an arrangement.
    Vary {
        /// Arrangement JSON file.
        #[arg(long)]
        arrangement: PathBuf,
        /// Boxes per variation.
        #[arg(long)]
        objects: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = VariatorParams::default().jitter_px)]
        jitter_px: u32,
    },
}

#[derive(Deserialize)]
struct MergeInput {
    #[serde(default)]
    subject_matter: Vec<String>,
    #[serde(default)]
    action_pose: Vec<String>,
    #[serde(default)]
    theme_mood: Vec<String>,
    #[serde(default)]
    arrangement: Option<Arrangement>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Arrangements from files go through the same validation as built ones.
fn checked(a: Arrangement) -> Result<Arrangement> {
    Ok(Arrangement::new(a.id, a.source_image, a.canvas_px, a.boxes)?)
}

fn emit(value: &impl serde::Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn bundle(spec: &str) -> Result<ProviderBundle> {
    ProviderBundle::load(spec).with_context(|| format!("loading provider bundle {spec:?}"))
}

async fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Serve { config } => {
            let cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    ServiceConfig::from_toml(&text).map_err(anyhow::Error::msg)?
                }
                None => ServiceConfig::default(),
            };
            recomb_service::serve(cfg).await?;
        }
        Command::Extract { image, run } => {
            let bytes = std::fs::read(&image).with_context(|| format!("reading {}", image.display()))?;
            let orch = Orchestrator::new(bundle(&run.bundle)?, Arc::new(MemoryBlobs::new())).with_seed(run.seed);
            let source = image.file_name().and_then(|n| n.to_str()).unwrap_or("image");
            let extraction = orch.extract_keywords(&bytes, source).await?;
            emit(&extraction)?;
        }
        Command::Merge { keywords_file, out_dir, more_sketches, run } => {
            let input: MergeInput = read_json(&keywords_file)?;
            let keywords = KeywordSet::from_lists(&input.subject_matter, &input.action_pose, &input.theme_mood);
            let blobs: Arc<dyn BlobSink> = match &out_dir {
                Some(dir) => Arc::new(FileBlobs::open(dir)?),
                None => Arc::new(MemoryBlobs::new()),
            };
            let orch = Orchestrator::new(bundle(&run.bundle)?, blobs).with_seed(run.seed);
            let ids: Vec<String> = (1..=3).map(|i| format!("draft-{i}")).collect();
            let arrangement = input.arrangement.map(checked).transpose()?;
            let mut outcome = orch.merge(&keywords, arrangement.as_ref(), &ids).await?;
            if more_sketches > 0 {
                for draft in &mut outcome.drafts {
                    let extra = orch.more_sketches(draft, more_sketches).await?;
                    if let Some(last) = extra.last() {
                        draft.layout_rank_used = last.rank;
                    }
                    draft.sketches.extend(extra);
                }
            }
            emit(&outcome)?;
        }
        Command::Eval { kind, manifest, bundle: spec, seed, out, threshold, n_sets } => {
            let manifest = Manifest::load(&manifest)?;
            let params = EvalParams { seed, match_threshold: threshold, n_sets, ..EvalParams::default() };
            let eval = Evaluator::new(bundle(&spec)?, params);
            let report = match kind {
                EvalCommand::Keywords => eval.keywords(&manifest).await?,
                EvalCommand::Recommend => eval.recommend(&manifest).await?,
                EvalCommand::Diversity => eval.diversity(&manifest).await?,
            };
            let bytes = report.to_json_bytes();
            match out {
                Some(path) => std::fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().lock().write_all(&bytes)?,
            }
            if let Err(issues) = report.check() {
                bail!("report failed its consistency checks: {}", issues.join("; "));
            }
        }
        Command::Layout { command: LayoutCommand::Vary { arrangement, objects, seed, jitter_px } } => {
            let arrangement = checked(read_json(&arrangement)?)?;
            let params = VariatorParams { jitter_px, canvas_px: arrangement.canvas_px, ..VariatorParams::default() }
                .with_seed(seed);
            let ranked = vary_arrangement(&arrangement, objects, &params)?;
            emit(&json!({ "arrangement": arrangement.id, "seed": seed, "ranked": ranked }))?;
        }
    }
    Ok(())
}

#[tokio::main]
async fn main() -> std::process::ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()).await {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
