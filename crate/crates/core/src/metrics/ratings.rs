//! Listening-test rating tables: ingestion, aggregation and group comparisons.

use std::fmt::{self, Write as _};
use std::io::Read;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::stats::{bh_adjust, bootstrap_ci, mean, significance_stars, welch_t_test, Alternative};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Neurodivergent,
    Control,
}

impl Group {
    pub fn short(self) -> &'static str {
        match self {
            Group::Neurodivergent => "N",
            Group::Control => "C",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "neurodivergent" | "n" => Some(Group::Neurodivergent),
            "control" | "c" => Some(Group::Control),
            _ => None,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Neurodivergent => "neurodivergent",
            Group::Control => "control",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub participant_id: String,
    pub group: Group,
    pub trigger: String,
    pub algorithm: String,
    pub rating: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatingsTable {
    pub rows: Vec<Rating>,
}

const HEADER: [&str; 5] = ["participant_id", "group", "trigger", "algorithm", "rating"];

impl RatingsTable {
    pub fn new(rows: Vec<Rating>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if !(0.0..=100.0).contains(&r.rating) {
                return Err(Error::Csv {
                    row: i + 1,
                    reason: format!("rating {} outside [0, 100]", r.rating),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    /// Parses CSV with header `participant_id,group,trigger,algorithm,rating`.
    /// Row numbers in errors count the header as row 1.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = csv
            .headers()
            .map_err(|e| Error::Csv {
                row: 1,
                reason: e.to_string(),
            })?
            .clone();
        if header.iter().collect::<Vec<_>>() != HEADER {
            return Err(Error::Csv {
                row: 1,
                reason: format!("expected header {}", HEADER.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let row = i + 2;
            let record = record.map_err(|e| Error::Csv {
                row,
                reason: e.to_string(),
            })?;
            let field = |k: usize| record.get(k).unwrap_or("");
            let group = Group::parse(field(1)).ok_or_else(|| Error::Csv {
                row,
                reason: format!("unknown group {:?}", field(1)),
            })?;
            let rating: f64 = field(4).parse().map_err(|_| Error::Csv {
                row,
                reason: format!("rating {:?} is not a number", field(4)),
            })?;
            if !(0.0..=100.0).contains(&rating) {
                return Err(Error::Csv {
                    row,
                    reason: format!("rating {rating} outside [0, 100]"),
                });
            }
            if field(0).is_empty() || field(2).is_empty() || field(3).is_empty() {
                return Err(Error::Csv {
                    row,
                    reason: "empty participant, trigger or algorithm".into(),
                });
            }
            rows.push(Rating {
                participant_id: field(0).to_string(),
                group,
                trigger: field(2).to_string(),
                algorithm: field(3).to_string(),
                rating,
            });
        }
        Ok(Self { rows })
    }

    pub fn algorithms(&self) -> Vec<String> {
        unique(self.rows.iter().map(|r| r.algorithm.as_str()))
    }

    pub fn triggers(&self) -> Vec<String> {
        unique(self.rows.iter().map(|r| r.trigger.as_str()))
    }

    /// Per-participant mean rating for one (algorithm, group) cell.
    pub fn participant_means(&self, algorithm: &str, group: Group) -> Vec<f64> {
        let mut acc: IndexMap<&str, (f64, usize)> = IndexMap::new();
        for r in self
            .rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.group == group)
        {
            let e = acc.entry(&r.participant_id).or_default();
            e.0 += r.rating;
            e.1 += 1;
        }
        acc.values().map(|(s, n)| s / *n as f64).collect()
    }
}

fn unique<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = indexmap::IndexSet::new();
    for i in items {
        seen.insert(i);
    }
    seen.into_iter().map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMeans {
    pub algorithm: String,
    pub group: Group,
    pub n_ratings: usize,
    /// Mean over every raw rating in the cell.
    pub mean_per_rating: f64,
    /// Unweighted mean of the per-trigger means.
    pub mean_per_trigger: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerMean {
    pub algorithm: String,
    pub group: Group,
    pub trigger: String,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub cells: Vec<CellMeans>,
    pub per_trigger: Vec<TriggerMean>,
}

impl Aggregates {
    pub fn cell(&self, algorithm: &str, group: Group) -> Option<&CellMeans> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.group == group)
    }

    /// `None` when no rating exists for the combination.
    pub fn trigger_mean(&self, algorithm: &str, group: Group, trigger: &str) -> Option<f64> {
        self.per_trigger
            .iter()
            .find(|t| t.algorithm == algorithm && t.group == group && t.trigger == trigger)
            .map(|t| t.mean)
    }
}

pub fn aggregate_ratings(table: &RatingsTable) -> Result<Aggregates> {
    if table.rows.is_empty() {
        return Err(Error::Empty("ratings table has no rows".into()));
    }
    let mut sums: IndexMap<(&str, Group, &str), (f64, usize)> = IndexMap::new();
    for r in &table.rows {
        let e = sums
            .entry((r.algorithm.as_str(), r.group, r.trigger.as_str()))
            .or_default();
        e.0 += r.rating;
        e.1 += 1;
    }
    let per_trigger: Vec<TriggerMean> = sums
        .iter()
        .map(|(&(a, g, t), &(s, n))| TriggerMean {
            algorithm: a.into(),
            group: g,
            trigger: t.into(),
            mean: s / n as f64,
        })
        .collect();

    let mut cells = Vec::new();
    for algorithm in table.algorithms() {
        for group in [Group::Neurodivergent, Group::Control] {
            let raw: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.algorithm == algorithm && r.group == group)
                .map(|r| r.rating)
                .collect();
            if raw.is_empty() {
                continue;
            }
            let trig: Vec<f64> = per_trigger
                .iter()
                .filter(|t| t.algorithm == algorithm && t.group == group)
                .map(|t| t.mean)
                .collect();
            cells.push(CellMeans {
                algorithm: algorithm.clone(),
                group,
                n_ratings: raw.len(),
                mean_per_rating: mean(&raw),
                mean_per_trigger: mean(&trig),
            });
        }
    }
    Ok(Aggregates { cells, per_trigger })
}

/// One hypothesis test with its multiplicity-adjusted p-value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub higher: String,
    pub lower: String,
    pub n_higher: usize,
    pub n_lower: usize,
    pub mean_difference: f64,
    pub p_value: Option<f64>,
    pub p_adjusted: Option<f64>,
}

impl Comparison {
    pub fn stars(&self) -> &'static str {
        self.p_adjusted.map(significance_stars).unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellInterval {
    pub algorithm: String,
    pub group: Group,
    pub n_participants: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingsReport {
    pub aggregates: Aggregates,
    pub triggers: Vec<String>,
    pub algorithms: Vec<String>,
    pub intervals: Vec<CellInterval>,
    /// Neurodivergent > control, one test per algorithm.
    pub group_comparisons: Vec<Comparison>,
    /// Algorithm A > algorithm B within each group.
    pub algorithm_comparisons: Vec<Comparison>,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub n_boot: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            n_boot: 2000,
            level: 0.95,
            seed: 0,
        }
    }
}

/// Aggregates, bootstrap intervals and BH-adjusted Welch tests.
///
/// Tests operate on per-participant mean ratings. Cells with fewer than two
/// participants yield no p-value.
pub fn analyze_ratings(table: &RatingsTable, options: AnalysisOptions) -> Result<RatingsReport> {
    let aggregates = aggregate_ratings(table)?;
    let algorithms = table.algorithms();
    let triggers = table.triggers();

    let mut intervals = Vec::new();
    for (i, cell) in aggregates.cells.iter().enumerate() {
        let means = table.participant_means(&cell.algorithm, cell.group);
        let (ci_low, ci_high) =
            bootstrap_ci(&means, options.n_boot, options.level, options.seed + i as u64)?;
        intervals.push(CellInterval {
            algorithm: cell.algorithm.clone(),
            group: cell.group,
            n_participants: means.len(),
            ci_low,
            ci_high,
        });
    }

    let mut group_comparisons: Vec<Comparison> = algorithms
        .iter()
        .map(|a| {
            compare(
                a.clone(),
                format!("{a}/N"),
                format!("{a}/C"),
                &table.participant_means(a, Group::Neurodivergent),
                &table.participant_means(a, Group::Control),
            )
        })
        .collect();
    adjust(&mut group_comparisons)?;

    let mut algorithm_comparisons = Vec::new();
    for group in [Group::Neurodivergent, Group::Control] {
        for a in &algorithms {
            for b in algorithms.iter().filter(|b| *b != a) {
                algorithm_comparisons.push(compare(
                    group.short().to_string(),
                    a.clone(),
                    b.clone(),
                    &table.participant_means(a, group),
                    &table.participant_means(b, group),
                ));
            }
        }
    }
    adjust(&mut algorithm_comparisons)?;

    Ok(RatingsReport {
        aggregates,
        triggers,
        algorithms,
        intervals,
        group_comparisons,
        algorithm_comparisons,
    })
}

fn compare(label: String, higher: String, lower: String, a: &[f64], b: &[f64]) -> Comparison {
    let mean_difference = if a.is_empty() || b.is_empty() {
        f64::NAN
    } else {
        mean(a) - mean(b)
    };
    Comparison {
        label,
        higher,
        lower,
        n_higher: a.len(),
        n_lower: b.len(),
        mean_difference,
        p_value: welch_t_test(a, b, Alternative::Greater)
            .ok()
            .map(|t| t.p_value),
        p_adjusted: None,
    }
}

fn adjust(comparisons: &mut [Comparison]) -> Result<()> {
    let idx: Vec<usize> = (0..comparisons.len())
        .filter(|&i| comparisons[i].p_value.is_some())
        .collect();
    let raw: Vec<f64> = idx.iter().map(|&i| comparisons[i].p_value.unwrap()).collect();
    for (&i, q) in idx.iter().zip(bh_adjust(&raw)?) {
        comparisons[i].p_adjusted = Some(q);
    }
    Ok(())
}

/// Letter used to mark "significantly higher than" an algorithm.
fn algorithm_letter(name: &str) -> char {
    name.rsplit('-')
        .next()
        .and_then(|s| s.chars().next())
        .unwrap_or('?')
}

impl RatingsReport {
    /// Names of algorithms that `algorithm` is rated significantly higher than
    /// (adjusted p < 0.05) within `group`.
    pub fn significantly_above(&self, algorithm: &str, group: Group) -> Vec<&str> {
        self.algorithm_comparisons
            .iter()
            .filter(|c| {
                c.label == group.short()
                    && c.higher == algorithm
                    && c.p_adjusted.is_some_and(|p| p < 0.05)
            })
            .map(|c| c.lower.as_str())
            .collect()
    }

    /// Trigger-by-algorithm table with N/C columns and an overall-mean row.
    ///
    /// Overall means are shown per-rating; the per-trigger-mean variant is
    /// listed beneath since the two weightings differ whenever cells are
    /// unbalanced. Stars mark N > C, superscript letters mark algorithms the
    /// cell is significantly above.
    pub fn render_table(&self) -> String {
        let width = self
            .triggers
            .iter()
            .map(String::len)
            .chain(["overall (per-trigger)".len()])
            .max()
            .unwrap_or(10);
        let groups = [Group::Neurodivergent, Group::Control];
        let mut out = String::new();
        let _ = write!(out, "{:width$}", "");
        for a in &self.algorithms {
            let _ = write!(out, " | {:^23}", a);
        }
        out.push('\n');
        let _ = write!(out, "{:width$}", "trigger");
        for _ in &self.algorithms {
            let _ = write!(out, " | {:>11} {:>11}", "N", "C");
        }
        out.push('\n');
        for t in &self.triggers {
            let _ = write!(out, "{t:width$}");
            for a in &self.algorithms {
                out.push_str(" |");
                for g in groups {
                    match self.aggregates.trigger_mean(a, g, t) {
                        Some(m) => {
                            let _ = write!(out, " {m:>11.1}");
                        }
                        None => {
                            let _ = write!(out, " {:>11}", "-");
                        }
                    }
                }
            }
            out.push('\n');
        }
        for (label, per_trigger) in [("overall mean", false), ("overall (per-trigger)", true)] {
            let _ = write!(out, "{label:width$}");
            for a in &self.algorithms {
                out.push_str(" |");
                for g in groups {
                    let Some(cell) = self.aggregates.cell(a, g) else {
                        let _ = write!(out, " {:>11}", "-");
                        continue;
                    };
                    let value = if per_trigger {
                        cell.mean_per_trigger
                    } else {
                        cell.mean_per_rating
                    };
                    let mut mark = String::new();
                    if !per_trigger {
                        if g == Group::Neurodivergent {
                            if let Some(c) = self.group_comparisons.iter().find(|c| c.label == *a) {
                                mark.push_str(c.stars());
                            }
                        }
                        let letters: String = self
                            .significantly_above(a, g)
                            .into_iter()
                            .map(algorithm_letter)
                            .collect();
                        if !letters.is_empty() {
                            mark.push('^');
                            mark.push_str(&letters);
                        }
                    }
                    let _ = write!(out, " {:>11}", format!("{value:.2}{mark}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(p: &str, g: Group, t: &str, a: &str, r: f64) -> Rating {
        Rating {
            participant_id: p.into(),
            group: g,
            trigger: t.into(),
            algorithm: a.into(),
            rating: r,
        }
    }

    #[test]
    fn single_rating_is_its_own_mean() {
        let t = RatingsTable::new(vec![row("p1", Group::Control, "alarm", "mix", 42.0)]).unwrap();
        let agg = aggregate_ratings(&t).unwrap();
        assert_eq!(agg.trigger_mean("mix", Group::Control, "alarm"), Some(42.0));
        let c = agg.cell("mix", Group::Control).unwrap();
        assert_eq!((c.mean_per_rating, c.mean_per_trigger), (42.0, 42.0));
        assert!(agg.cell("mix", Group::Neurodivergent).is_none());
        assert_eq!(agg.trigger_mean("mix", Group::Neurodivergent, "alarm"), None);
    }

    #[test]
    fn two_raters_average() {
        let t = RatingsTable::new(vec![
            row("p1", Group::Control, "alarm", "mix", 0.0),
            row("p2", Group::Control, "alarm", "mix", 100.0),
        ])
        .unwrap();
        let agg = aggregate_ratings(&t).unwrap();
        assert_eq!(agg.trigger_mean("mix", Group::Control, "alarm"), Some(50.0));
    }

    #[test]
    fn weightings_differ_on_unbalanced_cells() {
        let t = RatingsTable::new(vec![
            row("p1", Group::Control, "alarm", "mix", 10.0),
            row("p2", Group::Control, "alarm", "mix", 10.0),
            row("p3", Group::Control, "alarm", "mix", 10.0),
            row("p1", Group::Control, "tapping", "mix", 50.0),
        ])
        .unwrap();
        let c = aggregate_ratings(&t).unwrap().cells[0].clone();
        assert_eq!(c.mean_per_rating, 20.0);
        assert_eq!(c.mean_per_trigger, 30.0);
    }

    #[test]
    fn csv_schema_errors_carry_row_numbers() {
        let bad_header = "participant,group,trigger,algorithm,rating\n";
        assert!(matches!(
            RatingsTable::from_csv_reader(bad_header.as_bytes()),
            Err(Error::Csv { row: 1, .. })
        ));
        let bad_rating = "participant_id,group,trigger,algorithm,rating\np1,N,alarm,mix,50\np2,C,alarm,mix,150\n";
        assert!(matches!(
            RatingsTable::from_csv_reader(bad_rating.as_bytes()),
            Err(Error::Csv { row: 3, .. })
        ));
        let bad_group = "participant_id,group,trigger,algorithm,rating\np1,X,alarm,mix,50\n";
        assert!(matches!(
            RatingsTable::from_csv_reader(bad_group.as_bytes()),
            Err(Error::Csv { row: 2, .. })
        ));
        let ok = "participant_id,group,trigger,algorithm,rating\np1,neurodivergent,\"chewing, -mastication\",anc-drc,51.1\n";
        let t = RatingsTable::from_csv_reader(ok.as_bytes()).unwrap();
        assert_eq!(t.rows[0].trigger, "chewing, -mastication");
        assert_eq!(t.rows[0].group, Group::Neurodivergent);
    }

    #[test]
    fn empty_table_errors() {
        assert!(aggregate_ratings(&RatingsTable::default()).is_err());
    }

    #[test]
    fn letters_strip_prefix() {
        assert_eq!(algorithm_letter("anc-drc"), 'd');
        assert_eq!(algorithm_letter("anc-nn"), 'n');
        assert_eq!(algorithm_letter("mix"), 'm');
    }
}
