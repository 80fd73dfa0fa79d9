//! `artlens` — batch artwork analysis over vision LLMs.
//!
//! Exit codes: 0 ok, 1 partial (some artworks failed), 2 fatal config or
//! I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use artlens_core::pipeline::{Pipeline, PipelineOptions};
use artlens_core::reporting::{RunManifest, StageStatus};
use artlens_core::RunConfig;

#[derive(Parser)]
#[command(name = "artlens", version, about = "Batch art analysis pipeline")]
struct Cli {
    /// Run configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run directory (default: next fresh id under the configured base)
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,

    /// Seed for mock providers
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Replace every provider with a deterministic seeded mock
    #[arg(long, global = true)]
    mock: bool,

    /// Override the temporal bin width (years)
    #[arg(long, global = true)]
    bin_width: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a corpus manifest
    Ingest { manifest: PathBuf },
    /// First LLM pass: eight questions per artwork image
    Analyze,
    /// Second pass: structure raw answers into the facet taxonomy
    Synthesize,
    /// Embed and score analyses against style descriptions
    Evaluate,
    /// Emit analytics datasets, charts and the run manifest
    Report,
    /// All stages in order
    Run,
}

fn build_pipeline(cli: &Cli) -> anyhow::Result<Pipeline> {
    let config_path = cli
        .config
        .clone()
        .ok_or_else(|| anyhow::anyhow!("--config <file> is required"))?;
    let config = RunConfig::load(&config_path)?;
    let options = PipelineOptions {
        run_dir: cli.run_dir.clone(),
        seed: cli.seed,
        mock: cli.mock,
        bin_width: cli.bin_width,
    };
    Ok(Pipeline::new(config, &options)?)
}

fn exit_for(manifest: &RunManifest) -> ExitCode {
    match manifest.overall() {
        StageStatus::Ok => ExitCode::SUCCESS,
        StageStatus::Partial => ExitCode::from(1),
        StageStatus::Failed => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let pipeline = build_pipeline(cli)?;
    match &cli.command {
        Command::Ingest { manifest } => {
            let corpus = pipeline.ingest(Some(manifest))?;
            println!("ingested {} artworks into {}", corpus.records.len(), pipeline.run_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze => {
            let outcomes = pipeline.analyze()?;
            let ok = outcomes.iter().filter(|o| o.ok().is_some()).count();
            println!("analyzed {ok}/{} artworks", outcomes.len());
            Ok(if ok == outcomes.len() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Synthesize => {
            let outcomes = pipeline.synthesize()?;
            let ok = outcomes.iter().filter(|o| o.ok().is_some()).count();
            println!("synthesized {ok}/{} analyses", outcomes.len());
            Ok(if ok == outcomes.len() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Evaluate => {
            let scores = pipeline.evaluate()?;
            println!(
                "scored {} triples, {} missing (coverage {:.3})",
                scores.scores.len(),
                scores.missing.len(),
                scores.coverage()
            );
            Ok(if scores.missing.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Report => {
            let mut manifest = RunManifest::new(
                &pipeline.run_id(),
                &pipeline.config.digest(),
                "",
            );
            pipeline.report(&mut manifest)?;
            println!("report written to {}", pipeline.run_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run => {
            let manifest = pipeline.run()?;
            println!(
                "run {} finished: {:?}",
                manifest.run_id,
                manifest.stage_status
            );
            Ok(exit_for(&manifest))
        }
    }
}
