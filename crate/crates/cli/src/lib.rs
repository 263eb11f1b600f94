//! Command-line runner: corpus synthesis, dataset building, processing,
//! evaluation, ANC simulation, parameter search and ratings analysis.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "hushkit", version, about = "Trigger-sound attenuation toolkit")]
pub struct Cli {
    /// TOML run configuration; relative paths inside resolve against its directory.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Replaces every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-stimulus work (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Canonical sample rate in Hz.
    #[arg(long, global = true)]
    pub rate: Option<u32>,
    /// Attenuation curve CSV (`freq_hz,attenuation_db`).
    #[arg(long, global = true)]
    pub anc_curve: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write seeded synthetic source clips and their label CSV.
    SynthCorpus(commands::corpus::SynthCorpusArgs),
    /// Build a dataset manifest and its mixture/ground-truth WAVs.
    BuildDataset(commands::dataset::BuildDatasetArgs),
    /// Run one algorithm over every stimulus of a manifest.
    Process(commands::process::ProcessArgs),
    /// Score processed outputs with SI-SNR and delta SI-SNR.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Render selective-transparency stimuli.
    AncSim(commands::anc_sim::AncSimArgs),
    /// Tune an algorithm's parameters on a validation split.
    Optimize(commands::optimize::OptimizeArgs),
    /// Summarize a listening-test ratings CSV.
    AnalyzeRatings(commands::ratings::AnalyzeRatingsArgs),
}

/// Manifest selection shared by the per-stimulus commands.
#[derive(Debug, Clone, Default, Args)]
pub struct ManifestArgs {
    /// Manifest JSONL; its directory holds the `<id>_mix.wav`/`<id>_gt.wav` pairs.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Restrict to one split (train, val, test).
    #[arg(long)]
    pub split: Option<hushkit_core::mixgen::Split>,
}

impl Cli {
    pub fn load_config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        config.apply(&Overrides {
            seed: self.seed,
            rate: self.rate,
            anc_curve: self.anc_curve.clone(),
        });
        Ok(config)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        // fails only when a pool already exists, e.g. a second run in one process
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    let config = cli.load_config()?;
    match &cli.command {
        Command::SynthCorpus(args) => commands::corpus::run(&config, args),
        Command::BuildDataset(args) => commands::dataset::run(&config, args),
        Command::Process(args) => commands::process::run(&config, args),
        Command::Evaluate(args) => commands::evaluate::run(&config, args),
        Command::AncSim(args) => commands::anc_sim::run(&config, args),
        Command::Optimize(args) => commands::optimize::run(&config, args),
        Command::AnalyzeRatings(args) => commands::ratings::run(&config, args, cli.seed),
    }
}
