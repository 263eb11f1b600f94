use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Category, ClipStore, MixtureRecipe};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const POOLS_FILE: &str = "pools.json";

const TESTSET3_STIMULI: usize = 10;
const TESTSET3_MIN_TRIGGER_S: f64 = 0.5;
const TESTSET3_MIN_NEUTRAL_S: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Dataset1,
    Dataset2,
    Testset3,
}

impl DatasetKind {
    pub fn duration_s(self) -> f64 {
        match self {
            DatasetKind::Testset3 => 5.0,
            _ => 10.0,
        }
    }

    /// Default background level relative to the trigger.
    pub fn background_snr_db(self) -> f64 {
        match self {
            DatasetKind::Testset3 => -35.0,
            _ => -10.0,
        }
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dataset1" => Ok(DatasetKind::Dataset1),
            "dataset2" => Ok(DatasetKind::Dataset2),
            "testset3" => Ok(DatasetKind::Testset3),
            other => Err(Error::InvalidParam(format!(
                "unknown dataset kind {other:?} (dataset1, dataset2, testset3)"
            ))),
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetKind::Dataset1 => "dataset1",
            DatasetKind::Dataset2 => "dataset2",
            DatasetKind::Testset3 => "testset3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Split::ALL
            .into_iter()
            .find(|split| split.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown split {s:?} (train, val, test)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl Default for SplitCounts {
    fn default() -> Self {
        Self {
            train: 200,
            val: 50,
            test: 50,
        }
    }
}

impl SplitCounts {
    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    /// Ignored for testset3, which always has ten test stimuli.
    pub counts: SplitCounts,
    pub seed: u64,
    /// Overrides the kind's default background level.
    pub background_snr_db: Option<f64>,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, seed: u64) -> Self {
        Self {
            kind,
            counts: SplitCounts::default(),
            seed,
            background_snr_db: None,
        }
    }
}

/// One manifest line: a recipe plus its stimulus id and split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub split: Split,
    #[serde(flatten)]
    pub recipe: MixtureRecipe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub kind: DatasetKind,
    pub entries: Vec<ManifestEntry>,
    /// Clip ids available to each split; disjoint across splits.
    pub pools: BTreeMap<Split, Vec<String>>,
}

impl DatasetManifest {
    pub fn split_len(&self, split: Split) -> usize {
        self.entries.iter().filter(|e| e.split == split).count()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("manifest entries serialize"));
            out.push('\n');
        }
        out
    }

    /// Writes `manifest.jsonl` and `pools.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(MANIFEST_FILE);
        let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(self.to_jsonl().as_bytes())
            .map_err(|e| Error::io(&path, e))?;
        let pools = serde_json::json!({ "kind": self.kind, "pools": self.pools });
        let path = dir.join(POOLS_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(&pools).unwrap() + "\n")
            .map_err(|e| Error::io(&path, e))
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(&line).map_err(|e| Error::Csv {
            row: i + 1,
            reason: format!("{}: {e}", path.display()),
        })?;
        entries.push(entry);
    }
    Ok(entries)
}

/// The `index`-th output of a SplitMix64 stream seeded with `master`.
pub fn recipe_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn build_dataset(spec: &DatasetSpec, pool: &ClipStore) -> Result<DatasetManifest> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background_snr = spec
        .background_snr_db
        .unwrap_or_else(|| spec.kind.background_snr_db());
    if !background_snr.is_finite() {
        return Err(Error::InvalidParam("background SNR must be finite".into()));
    }
    match spec.kind {
        DatasetKind::Testset3 => build_testset3(spec, pool, background_snr, &mut rng),
        kind => build_training_style(kind, spec, pool, background_snr, &mut rng),
    }
}

fn build_training_style(
    kind: DatasetKind,
    spec: &DatasetSpec,
    pool: &ClipStore,
    background_snr: f64,
    rng: &mut ChaCha8Rng,
) -> Result<DatasetManifest> {
    let active: Vec<Split> = Split::ALL
        .into_iter()
        .filter(|&s| spec.counts.get(s) > 0)
        .collect();
    let mut by_split: BTreeMap<Split, BTreeMap<Category, Vec<String>>> = BTreeMap::new();
    for category in [Category::Trigger, Category::Neutral, Category::Background] {
        let mut ids: Vec<String> = pool.ids(category).into_iter().map(String::from).collect();
        if ids.len() < active.len() {
            return Err(Error::InsufficientPool(format!(
                "{} {category} clips for {} non-empty splits; every split needs its own",
                ids.len(),
                active.len()
            )));
        }
        ids.shuffle(rng);
        let shares = allocate(ids.len(), &active, &spec.counts);
        let mut rest = ids.as_slice();
        for (&split, share) in active.iter().zip(shares) {
            let (mine, tail) = rest.split_at(share);
            by_split
                .entry(split)
                .or_default()
                .insert(category, mine.to_vec());
            rest = tail;
        }
    }

    let mut entries = Vec::with_capacity(spec.counts.total());
    for &split in &active {
        let pools = &by_split[&split];
        for i in 0..spec.counts.get(split) {
            let pick = |c: Category, rng: &mut ChaCha8Rng| {
                let ids = &pools[&c];
                ids[rng.random_range(0..ids.len())].clone()
            };
            let trigger_id = pick(Category::Trigger, rng);
            let neutral_id = pick(Category::Neutral, rng);
            let background_id = pick(Category::Background, rng);
            let snr_neutral_db = match kind {
                DatasetKind::Dataset2 => rng.random_range(-15.0..=5.0),
                _ => 0.0,
            };
            let index = entries.len() as u64;
            entries.push(ManifestEntry {
                id: format!("{split}_{i:05}"),
                split,
                recipe: MixtureRecipe {
                    trigger_id,
                    neutral_id,
                    background_id,
                    snr_neutral_db,
                    snr_background_db: background_snr,
                    duration_s: kind.duration_s(),
                    seed: recipe_seed(spec.seed, index),
                },
            });
        }
    }
    let pools = by_split
        .into_iter()
        .map(|(split, cats)| (split, cats.into_values().flatten().collect()))
        .collect();
    Ok(DatasetManifest {
        kind,
        entries,
        pools,
    })
}

/// Splits `m` clips over the active splits: one each, the remainder
/// proportional to mixture counts (largest remainder).
fn allocate(m: usize, active: &[Split], counts: &SplitCounts) -> Vec<usize> {
    let spare = m - active.len();
    let total: usize = active.iter().map(|&s| counts.get(s)).sum();
    let exact: Vec<f64> = active
        .iter()
        .map(|&s| spare as f64 * counts.get(s) as f64 / total as f64)
        .collect();
    let mut shares: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..active.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    let assigned: usize = shares.iter().sum();
    for &i in order.iter().take(spare - assigned) {
        shares[i] += 1;
    }
    shares.iter().map(|s| s + 1).collect()
}

fn build_testset3(
    spec: &DatasetSpec,
    pool: &ClipStore,
    background_snr: f64,
    rng: &mut ChaCha8Rng,
) -> Result<DatasetManifest> {
    let long_enough = |c: Category, min_s: f64| -> Vec<String> {
        pool.iter()
            .filter(|clip| clip.category == c && clip.audio.duration_s() >= min_s)
            .map(|clip| clip.id.clone())
            .collect()
    };
    let triggers = long_enough(Category::Trigger, TESTSET3_MIN_TRIGGER_S);
    let neutrals = long_enough(Category::Neutral, TESTSET3_MIN_NEUTRAL_S);
    let traffic: Vec<String> = pool
        .iter()
        .filter(|c| c.category == Category::Background && c.label.to_lowercase().contains("traffic"))
        .map(|c| c.id.clone())
        .collect();
    if triggers.is_empty() || neutrals.is_empty() || traffic.is_empty() {
        return Err(Error::InsufficientPool(format!(
            "testset3 needs trigger clips >= {TESTSET3_MIN_TRIGGER_S} s ({} found), \
             neutral clips >= {TESTSET3_MIN_NEUTRAL_S} s ({} found) and \
             traffic-labeled background clips ({} found)",
            triggers.len(),
            neutrals.len(),
            traffic.len()
        )));
    }
    if triggers.len() * neutrals.len() < TESTSET3_STIMULI {
        return Err(Error::InsufficientPool(format!(
            "{} triggers x {} neutrals give fewer than {TESTSET3_STIMULI} distinct pairings",
            triggers.len(),
            neutrals.len()
        )));
    }
    let mut pairs: Vec<(usize, usize)> = (0..triggers.len())
        .flat_map(|t| (0..neutrals.len()).map(move |n| (t, n)))
        .collect();
    pairs.shuffle(rng);
    // greedy: spread stimuli over as many distinct clips as possible
    let (mut used_t, mut used_n) = (vec![0usize; triggers.len()], vec![0usize; neutrals.len()]);
    let mut entries = Vec::with_capacity(TESTSET3_STIMULI);
    for i in 0..TESTSET3_STIMULI {
        let (k, &(t, n)) = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, &(t, n))| used_t[t] + used_n[n])
            .unwrap();
        pairs.remove(k);
        used_t[t] += 1;
        used_n[n] += 1;
        entries.push(ManifestEntry {
            id: format!("t3_{i:02}"),
            split: Split::Test,
            recipe: MixtureRecipe {
                trigger_id: triggers[t].clone(),
                neutral_id: neutrals[n].clone(),
                background_id: traffic[rng.random_range(0..traffic.len())].clone(),
                snr_neutral_db: -10.0,
                snr_background_db: background_snr,
                duration_s: DatasetKind::Testset3.duration_s(),
                seed: recipe_seed(spec.seed, i as u64),
            },
        });
    }
    let pools = BTreeMap::from([(
        Split::Test,
        triggers.into_iter().chain(neutrals).chain(traffic).collect(),
    )]);
    Ok(DatasetManifest {
        kind: DatasetKind::Testset3,
        entries,
        pools,
    })
}
