//! Run configuration loaded from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hushkit_core::dsp::{Algorithm, ProcessorParams};
use hushkit_core::mixgen::{DatasetKind, Split, SplitCounts};
use hushkit_core::optimizer::{ParamSpace, Strategy, TpeConfig};
use hushkit_core::DEFAULT_SAMPLE_RATE;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub audio: AudioSection,
    pub corpus: CorpusSection,
    pub dataset: DatasetSection,
    pub processors: ProcessorParams,
    pub anc: AncSection,
    pub optimize: OptimizeSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AudioSection {
    pub rate: u32,
}

impl Default for AudioSection {
    fn default() -> Self {
        Self {
            rate: DEFAULT_SAMPLE_RATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    /// Defaults to `<output.dir>/corpus`.
    pub dir: Option<PathBuf>,
    /// Label map with header `filename,label,category`; defaults to
    /// `<dir>/labels.csv`.
    pub labels: Option<PathBuf>,
    /// Whether `synth-corpus` may generate into `dir`.
    pub synthetic: bool,
    pub clips_per_kind: usize,
    pub trigger_duration_s: f64,
    pub ambient_duration_s: f64,
    pub seed: u64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self {
            dir: None,
            labels: None,
            synthetic: true,
            clips_per_kind: 8,
            trigger_duration_s: 4.0,
            ambient_duration_s: 12.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub kind: DatasetKind,
    pub counts: SplitCounts,
    pub seed: u64,
    pub background_snr_db: Option<f64>,
    /// Defaults to `<output.dir>/<kind>`.
    pub dir: Option<PathBuf>,
}

impl Default for DatasetSection {
    fn default() -> Self {
        Self {
            kind: DatasetKind::Dataset1,
            counts: SplitCounts::default(),
            seed: 0,
            background_snr_db: None,
            dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AncSection {
    /// CSV with header `freq_hz,attenuation_db`; the built-in placeholder
    /// curve is used when absent.
    pub curve: Option<PathBuf>,
    /// Gain applied to the processed playback before summation.
    pub gain: f64,
}

impl Default for AncSection {
    fn default() -> Self {
        Self {
            curve: None,
            gain: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub strategy: Strategy,
    pub n_trials: usize,
    pub split: Split,
    /// Caps the number of validation stimuli scored per trial.
    pub max_stimuli: Option<usize>,
    pub seed: u64,
    pub tpe: TpeConfig,
    /// Per-algorithm overrides of the default search space.
    pub space: BTreeMap<Algorithm, ParamSpace>,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self {
            strategy: Strategy::Tpe,
            n_trials: 50,
            split: Split::Val,
            max_stimuli: None,
            seed: 0,
            tpe: TpeConfig::default(),
            space: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub rate: Option<u32>,
    pub anc_curve: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads `path` and resolves every relative path against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config =
            Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.output.dir);
        for p in [
            &mut self.corpus.dir,
            &mut self.corpus.labels,
            &mut self.dataset.dir,
            &mut self.anc.curve,
        ]
        .into_iter()
        .flatten()
        {
            join(p);
        }
    }

    /// Applies command-line overrides. The seed replaces every seed in the file.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.corpus.seed = seed;
            self.dataset.seed = seed;
            self.optimize.seed = seed;
        }
        if let Some(rate) = o.rate {
            self.audio.rate = rate;
        }
        if let Some(curve) = &o.anc_curve {
            self.anc.curve = Some(curve.clone());
        }
    }

    pub fn corpus_dir(&self) -> PathBuf {
        self.corpus
            .dir
            .clone()
            .unwrap_or_else(|| self.output.dir.join("corpus"))
    }

    pub fn labels_path(&self) -> PathBuf {
        self.corpus
            .labels
            .clone()
            .unwrap_or_else(|| self.corpus_dir().join(hushkit_core::mixgen::LABELS_FILE))
    }

    pub fn dataset_dir(&self) -> PathBuf {
        self.dataset
            .dir
            .clone()
            .unwrap_or_else(|| self.output.dir.join(self.dataset.kind.to_string()))
    }

    pub fn optimize_dir(&self) -> PathBuf {
        self.output.dir.join("optimize")
    }
}
