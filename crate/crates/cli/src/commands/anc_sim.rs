use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use hushkit_core::anc::{apply_attenuation, combine, selective_transparency, AttenuationCurve};
use hushkit_core::dsp::Algorithm;
use hushkit_core::wav::{read_wav, write_wav};

use super::{check_name, create_dir, for_each_stimulus, mix_path, processed_path, transparency_path, Stimuli};
use crate::config::RunConfig;
use crate::ManifestArgs;

/// File suffix of the ANC-only rendering.
pub const ANC_ONLY: &str = "none";

#[derive(Debug, Clone, Args)]
pub struct AncSimArgs {
    /// Algorithms to combine with the ANC residual (default: drc). DSP
    /// names run live; any other name (e.g. nn) adopts
    /// `<processed dir>/<id>_proc_<name>.wav`. The ANC-only rendering
    /// (`none`) is always written.
    pub algorithms: Vec<String>,
    #[command(flatten)]
    pub manifest: ManifestArgs,
    /// Directory of adopted processed WAVs (default: `<dataset dir>/processed`).
    #[arg(long)]
    pub processed: Option<PathBuf>,
    /// Output directory (default: `<dataset dir>/anc`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `anc.gain`.
    #[arg(long)]
    pub gain: Option<f64>,
}

pub fn load_curve(config: &RunConfig) -> Result<AttenuationCurve> {
    match &config.anc.curve {
        Some(path) => AttenuationCurve::from_csv_path(path)
            .with_context(|| format!("reading attenuation curve {}", path.display())),
        None => {
            log::info!("no attenuation curve configured; using the built-in placeholder");
            Ok(AttenuationCurve::placeholder())
        }
    }
}

enum Source {
    Live(Algorithm),
    Adopted(String),
}

pub fn run(config: &RunConfig, args: &AncSimArgs) -> Result<()> {
    let names: Vec<String> = if args.algorithms.is_empty() {
        vec!["drc".into()]
    } else {
        args.algorithms.clone()
    };
    let mut sources: Vec<(String, Source)> = Vec::new();
    for name in &names {
        check_name(name)?;
        if name == ANC_ONLY || sources.iter().any(|(n, _)| n == name) {
            continue;
        }
        sources.push(match name.parse::<Algorithm>() {
            Ok(alg) => {
                alg.build(&config.processors, config.audio.rate)?;
                (name.clone(), Source::Live(alg))
            }
            Err(_) => (name.clone(), Source::Adopted(name.clone())),
        });
    }
    let curve = load_curve(config)?;
    let gain = args.gain.unwrap_or(config.anc.gain);
    let stimuli = Stimuli::load(config, &args.manifest)?;
    let processed_dir = args.processed.clone().unwrap_or_else(|| stimuli.processed_dir());
    let out = args.out.clone().unwrap_or_else(|| stimuli.transparency_dir());
    create_dir(&out)?;
    for_each_stimulus(&stimuli.entries, "selective transparency", |e| {
        let mixture = read_wav(mix_path(&stimuli.dir, &e.id))?;
        let residual = apply_attenuation(&mixture, &curve)?;
        write_wav(&residual, transparency_path(&out, &e.id, ANC_ONLY))?;
        for (name, source) in &sources {
            let y = match source {
                Source::Live(alg) => {
                    let mut p = alg.build(&config.processors, mixture.sample_rate())?;
                    selective_transparency(&mixture, &curve, &mut *p, gain)?
                }
                Source::Adopted(name) => {
                    let path = processed_path(&processed_dir, &e.id, name);
                    let processed = read_wav(&path).with_context(|| {
                        format!("{name} is not a DSP algorithm; expected {}", path.display())
                    })?;
                    combine(&residual, &processed, gain)?
                }
            };
            write_wav(&y, transparency_path(&out, &e.id, name))?;
        }
        Ok(())
    })?;
    println!(
        "{} stimuli x {} renderings in {}",
        stimuli.entries.len(),
        sources.len() + 1,
        out.display()
    );
    Ok(())
}
