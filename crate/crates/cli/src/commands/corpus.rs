use anyhow::{bail, Context, Result};
use clap::Args;
use hushkit_core::mixgen::{synth_source, write_corpus, ClipStore, SourceKind};
use rayon::prelude::*;

use crate::config::RunConfig;

/// Clip seeds are `corpus.seed * SEED_STRIDE + index`.
pub const SEED_STRIDE: u64 = 1000;

#[derive(Debug, Clone, Default, Args)]
pub struct SynthCorpusArgs {
    /// Overrides `corpus.clips_per_kind`.
    #[arg(long)]
    pub clips_per_kind: Option<usize>,
}

pub fn synthesize(config: &RunConfig, clips_per_kind: usize) -> Result<ClipStore> {
    let c = &config.corpus;
    if clips_per_kind as u64 > SEED_STRIDE {
        bail!("clips_per_kind must be at most {SEED_STRIDE}");
    }
    let jobs: Vec<(SourceKind, u64)> = SourceKind::ALL
        .into_iter()
        .flat_map(|kind| (0..clips_per_kind as u64).map(move |i| (kind, i)))
        .collect();
    let clips = jobs
        .par_iter()
        .map(|&(kind, i)| {
            let duration = match kind.category() {
                hushkit_core::mixgen::Category::Trigger => c.trigger_duration_s,
                _ => c.ambient_duration_s,
            };
            let seed = c.seed.wrapping_mul(SEED_STRIDE).wrapping_add(i);
            synth_source(kind, duration, seed, config.audio.rate)
        })
        .collect::<hushkit_core::Result<Vec<_>>>()?;
    Ok(clips.into_iter().collect::<hushkit_core::Result<ClipStore>>()?)
}

pub fn run(config: &RunConfig, args: &SynthCorpusArgs) -> Result<()> {
    if !config.corpus.synthetic {
        bail!("corpus.synthetic is false; refusing to generate into {}", config.corpus_dir().display());
    }
    let n = args.clips_per_kind.unwrap_or(config.corpus.clips_per_kind);
    let store = synthesize(config, n)?;
    let dir = config.corpus_dir();
    write_corpus(&dir, &store).with_context(|| format!("writing corpus to {}", dir.display()))?;
    println!("wrote {} clips to {}", store.len(), dir.display());
    Ok(())
}
