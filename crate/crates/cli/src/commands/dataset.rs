use anyhow::{Context, Result};
use clap::Args;
use hushkit_core::mixgen::{
    build_dataset, ingest_corpus, synthesize_mixture, DatasetKind, DatasetManifest, DatasetSpec, Split,
};
use hushkit_core::wav::write_wav;

use super::{create_dir, for_each_stimulus, gt_path, mix_path};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args)]
pub struct BuildDatasetArgs {
    /// Overrides `dataset.kind` (dataset1, dataset2, testset3).
    #[arg(long)]
    pub kind: Option<DatasetKind>,
}

pub fn run(config: &RunConfig, args: &BuildDatasetArgs) -> Result<()> {
    let mut config = config.clone();
    if let Some(kind) = args.kind {
        config.dataset.kind = kind;
    }
    let manifest = build(&config)?;
    let sizes: Vec<String> = Split::ALL
        .iter()
        .map(|&s| format!("{s} {}", manifest.split_len(s)))
        .collect();
    println!(
        "{} stimuli ({}) in {}",
        manifest.entries.len(),
        sizes.join(", "),
        config.dataset_dir().display()
    );
    Ok(())
}

pub fn build(config: &RunConfig) -> Result<DatasetManifest> {
    let corpus = config.corpus_dir();
    let (pool, report) = ingest_corpus(&corpus, config.labels_path(), config.audio.rate)
        .with_context(|| format!("loading corpus {} (run synth-corpus first)", corpus.display()))?;
    for (path, reason) in &report.skipped {
        log::warn!("skipped {}: {reason}", path.display());
    }
    if report.warnings() > 0 {
        eprintln!("warning: {} corpus files skipped", report.warnings());
    }
    let d = &config.dataset;
    let spec = DatasetSpec {
        kind: d.kind,
        counts: d.counts,
        seed: d.seed,
        background_snr_db: d.background_snr_db,
    };
    let manifest = build_dataset(&spec, &pool)
        .with_context(|| format!("building {} from {} clips", d.kind, pool.len()))?;
    let dir = config.dataset_dir();
    create_dir(&dir)?;
    manifest.write(&dir)?;
    for_each_stimulus(&manifest.entries, "mixture synthesis", |e| {
        let m = synthesize_mixture(&e.recipe, &pool)?;
        write_wav(&m.mixture, mix_path(&dir, &e.id))?;
        write_wav(&m.ground_truth, gt_path(&dir, &e.id))?;
        Ok(())
    })?;
    Ok(manifest)
}
