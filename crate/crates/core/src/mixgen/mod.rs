//! Trigger / neutral / background mixture synthesis and dataset recipes.
//!
//! Companion levels in a [`MixtureRecipe`] are given relative to the trigger:
//! a neutral at −10 dB sits 10 dB below the trigger.

mod corpus;
mod dataset;
mod mix;
pub mod synth;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

pub use corpus::{ingest_corpus, write_corpus, IngestReport, LABELS_FILE};
pub use dataset::{
    build_dataset, read_manifest, recipe_seed, DatasetKind, DatasetManifest, DatasetSpec,
    ManifestEntry, Split, SplitCounts, MANIFEST_FILE, POOLS_FILE,
};
pub use mix::{
    loop_to_length, scale_to_snr, synthesize_mixture, CROSSFADE_MS, PEAK_GUARD,
    TRIGGER_LEVEL_DBFS,
};
pub use synth::{synth_source, SourceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Trigger,
    Neutral,
    Background,
}

impl std::str::FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trigger" => Ok(Category::Trigger),
            "neutral" => Ok(Category::Neutral),
            "background" => Ok(Category::Background),
            other => Err(Error::InvalidParam(format!("unknown category {other:?}"))),
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Category::Trigger => "trigger",
            Category::Neutral => "neutral",
            Category::Background => "background",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceClip {
    pub id: String,
    pub label: String,
    pub category: Category,
    pub audio: AudioBuffer,
}

/// Clips keyed by id, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct ClipStore {
    clips: IndexMap<String, SourceClip>,
}

impl ClipStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rejects duplicate ids and labels already registered under another
    /// category, so a sound class can never be both trigger and neutral.
    pub fn insert(&mut self, clip: SourceClip) -> Result<()> {
        if self.clips.contains_key(&clip.id) {
            return Err(Error::InvalidParam(format!("duplicate clip id {:?}", clip.id)));
        }
        if let Some(other) = self
            .clips
            .values()
            .find(|c| c.label == clip.label && c.category != clip.category)
        {
            return Err(Error::InvalidParam(format!(
                "label {:?} already used as {} (clip {})",
                clip.label, other.category, other.id
            )));
        }
        self.clips.insert(clip.id.clone(), clip);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&SourceClip> {
        self.clips
            .get(id)
            .ok_or_else(|| Error::UnknownClip(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.clips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clips.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SourceClip> {
        self.clips.values()
    }

    pub fn ids(&self, category: Category) -> Vec<&str> {
        self.iter()
            .filter(|c| c.category == category)
            .map(|c| c.id.as_str())
            .collect()
    }
}

impl FromIterator<SourceClip> for Result<ClipStore> {
    fn from_iter<I: IntoIterator<Item = SourceClip>>(iter: I) -> Self {
        let mut store = ClipStore::new();
        for clip in iter {
            store.insert(clip)?;
        }
        Ok(store)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureRecipe {
    pub trigger_id: String,
    pub neutral_id: String,
    pub background_id: String,
    /// Neutral level relative to the trigger, dB.
    pub snr_neutral_db: f64,
    /// Background level relative to the trigger, dB.
    pub snr_background_db: f64,
    pub duration_s: f64,
    pub seed: u64,
}

impl MixtureRecipe {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0) || !self.duration_s.is_finite() {
            return Err(Error::InvalidParam(format!(
                "duration {} must be > 0",
                self.duration_s
            )));
        }
        if !self.snr_neutral_db.is_finite() || !self.snr_background_db.is_finite() {
            return Err(Error::InvalidParam("recipe SNRs must be finite".into()));
        }
        let ids = [&self.trigger_id, &self.neutral_id, &self.background_id];
        if ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2] {
            return Err(Error::InvalidParam("recipe clip ids must be distinct".into()));
        }
        Ok(())
    }
}

/// A synthesized stimulus. `mixture == ground_truth + trigger_component`;
/// the neutral and background parts are kept for level checks.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureResult {
    pub mixture: AudioBuffer,
    pub ground_truth: AudioBuffer,
    pub trigger_component: AudioBuffer,
    pub neutral_component: AudioBuffer,
    pub background_component: AudioBuffer,
}

impl MixtureResult {
    /// Rebuilds a stimulus from a stored mixture and ground truth. The
    /// neutral/background split is not recoverable, so the whole ground truth
    /// is reported as the neutral component.
    pub fn from_pair(mixture: AudioBuffer, ground_truth: AudioBuffer) -> Result<Self> {
        let trigger_component = mixture.add(&ground_truth.scaled(-1.0)?)?;
        let background_component = AudioBuffer::silence(mixture.len(), mixture.sample_rate())?;
        Ok(Self {
            mixture,
            neutral_component: ground_truth.clone(),
            ground_truth,
            trigger_component,
            background_component,
        })
    }
}
