use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::Args;
use hushkit_core::dsp::Algorithm;
use hushkit_core::resample::resample;
use hushkit_core::wav::{read_wav, write_wav};
use hushkit_core::AudioBuffer;

use super::{create_dir, for_each_stimulus, mix_path, processed_path, Stimuli};
use crate::config::RunConfig;
use crate::ManifestArgs;

/// Name of the adapter over externally separated WAVs.
pub const NN: &str = "nn";

#[derive(Debug, Clone, Args)]
pub struct ProcessArgs {
    /// drc, eq, agc, mctr, lpf, identity, zero or nn.
    pub algorithm: String,
    #[command(flatten)]
    pub manifest: ManifestArgs,
    /// Directory of `<id>_proc_nn.wav` files written by the separator
    /// (default: `<dataset dir>/nn`).
    #[arg(long)]
    pub nn_dir: Option<PathBuf>,
    /// Output directory (default: `<dataset dir>/processed`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(config: &RunConfig, args: &ProcessArgs) -> Result<()> {
    let algorithm = match args.algorithm.as_str() {
        NN => None,
        name => {
            let algorithm: Algorithm = name.parse()?;
            // fail on bad parameters before touching any stimulus
            algorithm.build(&config.processors, config.audio.rate)?;
            Some(algorithm)
        }
    };
    let stimuli = Stimuli::load(config, &args.manifest)?;
    let out = args.out.clone().unwrap_or_else(|| stimuli.processed_dir());
    create_dir(&out)?;
    if let Some(algorithm) = algorithm {
        for_each_stimulus(&stimuli.entries, &format!("{algorithm} processing"), |e| {
            let mixture = read_wav(mix_path(&stimuli.dir, &e.id))?;
            let mut processor = algorithm.build(&config.processors, mixture.sample_rate())?;
            let processed = processor.process_buffer(&mixture)?;
            write_wav(&processed, processed_path(&out, &e.id, algorithm.name()))?;
            Ok(())
        })?;
    } else {
        let nn_dir = args.nn_dir.clone().unwrap_or_else(|| stimuli.dir.join("nn"));
        adopt_nn(&stimuli, &nn_dir, &out, config.audio.rate)?;
    }
    println!(
        "{} {} outputs in {}",
        stimuli.entries.len(),
        args.algorithm,
        out.display()
    );
    Ok(())
}

/// Copies externally produced outputs into `out`, resampling to `rate` and
/// checking that each matches its mixture's length.
fn adopt_nn(stimuli: &Stimuli, nn_dir: &Path, out: &Path, rate: u32) -> Result<()> {
    if !nn_dir.is_dir() {
        bail!(
            "nn outputs not found: expected directory {} containing <id>_proc_nn.wav \
             for each stimulus (set --nn-dir to another location)",
            nn_dir.display()
        );
    }
    let missing: Vec<String> = stimuli
        .entries
        .iter()
        .map(|e| processed_path(nn_dir, &e.id, NN))
        .filter(|p| !p.is_file())
        .map(|p| format!("  {}", p.display()))
        .collect();
    if !missing.is_empty() {
        bail!(
            "{} of {} nn outputs missing:\n{}",
            missing.len(),
            stimuli.entries.len(),
            missing.join("\n")
        );
    }
    for_each_stimulus(&stimuli.entries, "nn adoption", |e| {
        let source = processed_path(nn_dir, &e.id, NN);
        let mut y = read_wav(&source)?;
        if y.sample_rate() != rate {
            log::warn!("{}: resampling {} Hz to {rate} Hz", source.display(), y.sample_rate());
            y = resample(&y, rate)?;
        }
        let mixture: AudioBuffer = read_wav(mix_path(&stimuli.dir, &e.id))?;
        if y.len() != mixture.len() {
            bail!(
                "{} has {} samples, mixture has {}",
                source.display(),
                y.len(),
                mixture.len()
            );
        }
        let target = processed_path(out, &e.id, NN);
        if target != source {
            write_wav(&y, target)?;
        }
        Ok(())
    })
}
