use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use hushkit_core::metrics::ratings::Comparison;
use hushkit_core::metrics::{analyze_ratings, AnalysisOptions, RatingsReport, RatingsTable};

use crate::config::RunConfig;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeRatingsArgs {
    /// CSV with header `participant_id,group,trigger,algorithm,rating`.
    pub csv: PathBuf,
    /// Bootstrap resamples per cell interval.
    #[arg(long, default_value_t = AnalysisOptions::default().n_boot)]
    pub n_boot: usize,
    /// Confidence level of the cell intervals.
    #[arg(long, default_value_t = AnalysisOptions::default().level)]
    pub level: f64,
    /// Also write the full report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn analyze(args: &AnalyzeRatingsArgs, seed: u64) -> Result<RatingsReport> {
    let table = RatingsTable::from_csv_path(&args.csv)
        .with_context(|| format!("reading ratings {}", args.csv.display()))?;
    Ok(analyze_ratings(
        &table,
        AnalysisOptions {
            n_boot: args.n_boot,
            level: args.level,
            seed,
        },
    )?)
}

fn fmt_p(p: Option<f64>) -> String {
    p.map_or("-".into(), |p| format!("{p:.4}"))
}

fn render_comparisons(title: &str, comparisons: &[Comparison]) -> String {
    let mut out = format!("\n{title}\n");
    for c in comparisons {
        let _ = writeln!(
            out,
            "  {:<40} diff {:>7.2}  p {:>7}  p_bh {:>7} {}",
            c.label,
            c.mean_difference,
            fmt_p(c.p_value),
            fmt_p(c.p_adjusted),
            c.stars()
        );
    }
    out
}

pub fn render(report: &RatingsReport) -> String {
    let mut out = report.render_table();
    out.push_str(&render_comparisons(
        "neurodivergent > control (Welch, BH-adjusted per family)",
        &report.group_comparisons,
    ));
    out.push_str(&render_comparisons("algorithm > algorithm within group", &report.algorithm_comparisons));
    out.push_str("\ncell means with bootstrap intervals over participant means\n");
    for i in &report.intervals {
        let _ = writeln!(
            out,
            "  {:<12} {}  n {:>4}  [{:.2}, {:.2}]",
            i.algorithm, i.group, i.n_participants, i.ci_low, i.ci_high
        );
    }
    out.push_str("\nsignificance: * p < 0.05, ** p < 0.01, *** p < 0.001 (BH-adjusted)\n");
    out
}

pub fn run(_config: &RunConfig, args: &AnalyzeRatingsArgs, seed: Option<u64>) -> Result<()> {
    let report = analyze(args, seed.unwrap_or(0))?;
    print!("{}", render(&report));
    if let Some(path) = &args.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| path.display().to_string())?;
    }
    Ok(())
}
