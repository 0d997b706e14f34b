//! Thin CLI over the pipeline stages; all logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use retweet_polarity::pipeline::{Pipeline, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "retweet-polarity",
    version,
    about = "Political-leaning estimation from retweet networks and profile text",
    after_help = "Stages read and write files under --out-dir; run `synth` first \
                  (or point [paths] at real data), then `run-all`."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Pipeline configuration file (TOML); defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for stage inputs and outputs (default "out").
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Master seed; per-stage seeds are derived from it.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Force deterministic mode (this implementation is deterministic either
    /// way; the flag is accepted for scripted runs).
    #[arg(long, global = true)]
    deterministic: bool,

    /// Log filter: error, warn, info, debug, or trace.
    #[arg(long, global = true, default_value = "info", value_name = "LEVEL")]
    log_level: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus (users, edges, endorsements, truth, vectors).
    Synth,
    /// Apply preprocessing filters to raw users and edges.
    Ingest,
    /// Build the weighted retweet graph from the filtered working set.
    BuildGraph,
    /// Pseudo-label seed users from hashtags and media endorsements.
    Seed,
    /// Train the encoder on the retweet graph (no labels).
    Train,
    /// Cross-validate models and write metrics.json.
    Evaluate {
        /// Evaluate a single model instead of the configured list.
        #[arg(long, value_name = "MODEL")]
        model: Option<String>,
    },
    /// Fit the final head on all seeds and score every user.
    Predict,
    /// Partition scores and write the echo-chamber report.
    Analyze,
    /// ingest, build-graph, seed, train, evaluate, predict, analyze.
    RunAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(out_dir) = cli.out_dir {
        config.out_dir = out_dir;
    }
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if cli.deterministic {
        config.deterministic = true;
    }
    let pipeline = Pipeline::new(config)?;

    match cli.command {
        Command::Synth => pipeline.synth()?,
        Command::Ingest => pipeline.ingest()?,
        Command::BuildGraph => pipeline.build_graph()?,
        Command::Seed => pipeline.seed()?,
        Command::Train => pipeline.train()?,
        Command::Evaluate { model } => {
            pipeline.evaluate(model.as_deref())?;
        }
        Command::Predict => pipeline.predict()?,
        Command::Analyze => pipeline.analyze()?,
        Command::RunAll => pipeline.run_all()?,
    }
    Ok(())
}
