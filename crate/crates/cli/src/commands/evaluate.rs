use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use hushkit_core::metrics::stats::{mean, variance};
use hushkit_core::metrics::EvalRecord;
use hushkit_core::wav::read_wav;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_name, create_dir, gt_path, mix_path, processed_path, Stimuli};
use crate::config::RunConfig;
use crate::ManifestArgs;

pub const DEFAULT_ALGORITHMS: [&str; 5] = ["drc", "eq", "agc", "mctr", "lpf"];

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Algorithm names whose `<id>_proc_<name>.wav` files are scored
    /// (default: the five DSP processors).
    pub algorithms: Vec<String>,
    #[command(flatten)]
    pub manifest: ManifestArgs,
    /// Directory of processed WAVs (default: `<dataset dir>/processed`).
    #[arg(long)]
    pub processed: Option<PathBuf>,
    /// Output directory (default: `<dataset dir>/eval`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write `plot_data.csv` (algorithm, delta SI-SNR) for external plotting.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub n: usize,
    pub n_missing: usize,
    pub mean_si_snr_db: f64,
    pub mean_delta_si_snr_db: f64,
    pub std_delta_si_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub records: Vec<EvalRecord>,
    pub summary: Vec<SummaryRow>,
    /// `(stimulus id, algorithm, reason)` for every pair not scored.
    pub missing: Vec<Missing>,
}

/// `(stimulus id, algorithm, reason)` of a pair that could not be scored.
pub type Missing = (String, String, String);

/// Scores every (stimulus, algorithm) pair whose files are readable.
pub fn evaluate(stimuli: &Stimuli, processed_dir: &Path, algorithms: &[String]) -> Result<Evaluation> {
    let per_stimulus: Vec<Vec<std::result::Result<EvalRecord, Missing>>> = stimuli
        .entries
        .par_iter()
        .map(|e| {
            let pair = read_wav(mix_path(&stimuli.dir, &e.id))
                .and_then(|m| Ok((m, read_wav(gt_path(&stimuli.dir, &e.id))?)));
            algorithms
                .iter()
                .map(|alg| {
                    let fail = |reason: String| (e.id.clone(), alg.clone(), reason);
                    let (mixture, gt) = pair.as_ref().map_err(|err| fail(err.to_string()))?;
                    let processed = read_wav(processed_path(processed_dir, &e.id, alg))
                        .map_err(|err| fail(err.to_string()))?;
                    EvalRecord::evaluate(&e.id, alg, &processed, mixture, gt)
                        .map_err(|err| fail(err.to_string()))
                })
                .collect()
        })
        .collect();

    let mut records = Vec::new();
    let mut missing = Vec::new();
    for row in per_stimulus {
        for r in row {
            match r {
                Ok(rec) => records.push(rec),
                Err(m) => missing.push(m),
            }
        }
    }
    // stimulus-major order from the manifest; regroup by algorithm
    records.sort_by_key(|r| algorithms.iter().position(|a| *a == r.algorithm));
    let summary = algorithms
        .iter()
        .map(|alg| {
            let rows: Vec<&EvalRecord> = records.iter().filter(|r| &r.algorithm == alg).collect();
            let delta: Vec<f64> = rows.iter().map(|r| r.delta_si_snr_db).collect();
            let score: Vec<f64> = rows.iter().map(|r| r.si_snr_db).collect();
            SummaryRow {
                algorithm: alg.clone(),
                n: rows.len(),
                n_missing: missing.iter().filter(|m| &m.1 == alg).count(),
                mean_si_snr_db: if score.is_empty() { f64::NAN } else { mean(&score) },
                mean_delta_si_snr_db: if delta.is_empty() { f64::NAN } else { mean(&delta) },
                std_delta_si_snr_db: if delta.len() < 2 { f64::NAN } else { variance(&delta).sqrt() },
            }
        })
        .collect();
    Ok(Evaluation {
        records,
        summary,
        missing,
    })
}

pub fn run(config: &RunConfig, args: &EvaluateArgs) -> Result<()> {
    let algorithms: Vec<String> = if args.algorithms.is_empty() {
        DEFAULT_ALGORITHMS.iter().map(|s| s.to_string()).collect()
    } else {
        args.algorithms.clone()
    };
    for a in &algorithms {
        check_name(a)?;
    }
    let stimuli = Stimuli::load(config, &args.manifest)?;
    let processed = args.processed.clone().unwrap_or_else(|| stimuli.processed_dir());
    let out = args.out.clone().unwrap_or_else(|| stimuli.eval_dir());
    let eval = evaluate(&stimuli, &processed, &algorithms)?;
    if eval.records.is_empty() && !stimuli.entries.is_empty() {
        bail!(
            "no processed outputs could be scored in {} (run process first)",
            processed.display()
        );
    }
    for (id, alg, reason) in &eval.missing {
        log::warn!("{id}/{alg}: {reason}");
    }
    if !eval.missing.is_empty() {
        eprintln!(
            "warning: {} of {} (stimulus, algorithm) pairs not scored",
            eval.missing.len(),
            stimuli.entries.len() * algorithms.len()
        );
    }
    write_outputs(&out, &eval, args.plot_data)?;
    print!("{}", render_summary(&eval.summary));
    Ok(())
}

fn write_outputs(out: &Path, eval: &Evaluation, plot_data: bool) -> Result<()> {
    create_dir(out)?;
    let csv_path = out.join("eval.csv");
    let mut w = csv::Writer::from_path(&csv_path).with_context(|| csv_path.display().to_string())?;
    for r in &eval.records {
        w.serialize(r)?;
    }
    w.flush()?;

    let jsonl = out.join("eval.jsonl");
    let mut f = BufWriter::new(File::create(&jsonl).with_context(|| jsonl.display().to_string())?);
    for r in &eval.records {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;

    let summary = out.join("summary.csv");
    let mut w = csv::Writer::from_path(&summary).with_context(|| summary.display().to_string())?;
    for s in &eval.summary {
        w.serialize(s)?;
    }
    w.flush()?;

    if plot_data {
        let plot = out.join("plot_data.csv");
        let mut w = csv::Writer::from_path(&plot).with_context(|| plot.display().to_string())?;
        w.write_record(["algorithm", "delta_si_snr_db"])?;
        for r in &eval.records {
            w.write_record([r.algorithm.clone(), r.delta_si_snr_db.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}

pub fn render_summary(summary: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<12} {:>5} {:>8} {:>12} {:>12} {:>10}\n",
        "algorithm", "n", "missing", "SI-SNR", "dSI-SNR", "sd"
    );
    for s in summary {
        out.push_str(&format!(
            "{:<12} {:>5} {:>8} {:>12.2} {:>12.2} {:>10.2}\n",
            s.algorithm, s.n, s.n_missing, s.mean_si_snr_db, s.mean_delta_si_snr_db, s.std_delta_si_snr_db
        ));
    }
    out
}
