use std::fs::File;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use hushkit_core::dsp::{Algorithm, ProcessorParams};
use hushkit_core::mixgen::MixtureResult;
use hushkit_core::optimizer::{
    apply_params, default_space, mean_sisnr_objective, run_search, write_history, ParamSpace, Params,
    Strategy, Trial, TUNABLE,
};
use hushkit_core::wav::read_wav;
use rayon::prelude::*;

use super::{create_dir, gt_path, mix_path, Stimuli};
use crate::config::RunConfig;
use crate::ManifestArgs;

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    /// drc, eq or agc.
    pub algorithm: Algorithm,
    /// Overrides `optimize.n_trials`.
    #[arg(long)]
    pub n_trials: Option<usize>,
    /// Overrides `optimize.strategy` (tpe, random).
    #[arg(long)]
    pub strategy: Option<Strategy>,
    #[command(flatten)]
    pub manifest: ManifestArgs,
    /// Output directory (default: `<output dir>/optimize`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub best: Trial,
    pub history: Vec<Trial>,
    /// Objective of the configured parameters.
    pub baseline: f64,
    pub tuned: ProcessorParams,
    pub n_stimuli: usize,
    pub space: ParamSpace,
}

pub fn optimize(config: &RunConfig, args: &OptimizeArgs) -> Result<Outcome> {
    let alg = args.algorithm;
    if !TUNABLE.contains(&alg) {
        bail!("{alg} is not tunable (drc, eq, agc)");
    }
    let o = &config.optimize;
    let space = match o.space.get(&alg) {
        Some(space) => space.clone(),
        None => default_space(alg)?,
    };
    let mut selection = args.manifest.clone();
    selection.split = selection.split.or(Some(o.split));
    let mut stimuli = Stimuli::load(config, &selection)?;
    if let Some(cap) = o.max_stimuli {
        stimuli.entries.truncate(cap);
    }
    if stimuli.entries.is_empty() {
        bail!("no {} stimuli to optimize on", selection.split.unwrap());
    }
    let validation = stimuli
        .entries
        .par_iter()
        .map(|e| {
            let mixture = read_wav(mix_path(&stimuli.dir, &e.id))?;
            let gt = read_wav(gt_path(&stimuli.dir, &e.id))?;
            Ok(MixtureResult::from_pair(mixture, gt)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let base = &config.processors;
    let rate = config.audio.rate;
    let objective = mean_sisnr_objective(
        |p: &Params| alg.build(&apply_params(alg, base, p)?, rate),
        &validation,
    )?;
    let baseline = objective(&Params::new());
    let (best, history) = run_search(
        |p: &Params| Ok(objective(p)),
        &space,
        args.n_trials.unwrap_or(o.n_trials),
        args.strategy.unwrap_or(o.strategy),
        &o.tpe,
        o.seed,
    )?;
    let tuned = apply_params(alg, base, &best.params)?;
    Ok(Outcome {
        best,
        history,
        baseline,
        tuned,
        n_stimuli: validation.len(),
        space,
    })
}

/// `[processors.<alg>]` section loadable as a run configuration.
pub fn best_params_toml(alg: Algorithm, outcome: &Outcome) -> Result<String> {
    let all = toml::Table::try_from(&outcome.tuned)?;
    let section = all
        .get(alg.name())
        .ok_or_else(|| anyhow!("no {alg} section in processor parameters"))?
        .clone();
    let mut processors = toml::Table::new();
    processors.insert(alg.name().into(), section);
    let mut doc = toml::Table::new();
    doc.insert("processors".into(), toml::Value::Table(processors));
    Ok(format!(
        "# mean SI-SNR {:.3} dB over {} stimuli (configured parameters: {:.3} dB)\n{}",
        outcome.best.objective,
        outcome.n_stimuli,
        outcome.baseline,
        toml::to_string(&doc)?
    ))
}

pub fn run(config: &RunConfig, args: &OptimizeArgs) -> Result<()> {
    let outcome = optimize(config, args)?;
    let alg = args.algorithm;
    let out = args.out.clone().unwrap_or_else(|| config.optimize_dir());
    create_dir(&out)?;
    let history_path = out.join(format!("{alg}_history.csv"));
    let f = File::create(&history_path).with_context(|| history_path.display().to_string())?;
    write_history(f, &outcome.space, &outcome.history)?;
    let best_path = out.join(format!("{alg}_best.toml"));
    std::fs::write(&best_path, best_params_toml(alg, &outcome)?)
        .with_context(|| best_path.display().to_string())?;
    if outcome.baseline > outcome.best.objective {
        log::warn!(
            "no trial beat the configured {alg} parameters ({:.3} dB > {:.3} dB); consider more trials",
            outcome.baseline,
            outcome.best.objective
        );
    }
    println!(
        "{alg}: best mean SI-SNR {:.3} dB after {} trials (configured {:.3} dB); wrote {}",
        outcome.best.objective,
        outcome.history.len(),
        outcome.baseline,
        best_path.display()
    );
    Ok(())
}
