//! Subcommand implementations and the on-disk naming scheme they share.

pub mod anc_sim;
pub mod corpus;
pub mod dataset;
pub mod evaluate;
pub mod optimize;
pub mod process;
pub mod ratings;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hushkit_core::mixgen::{read_manifest, ManifestEntry, MANIFEST_FILE};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::ManifestArgs;

pub fn mix_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}_mix.wav"))
}

pub fn gt_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}_gt.wav"))
}

pub fn processed_path(dir: &Path, id: &str, algorithm: &str) -> PathBuf {
    dir.join(format!("{id}_proc_{algorithm}.wav"))
}

pub fn transparency_path(dir: &Path, id: &str, algorithm: &str) -> PathBuf {
    dir.join(format!("{id}_st_{algorithm}.wav"))
}

/// A manifest and the directory holding its WAV pairs.
#[derive(Debug, Clone)]
pub struct Stimuli {
    pub dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Stimuli {
    pub fn load(config: &RunConfig, args: &ManifestArgs) -> Result<Self> {
        let path = args
            .manifest
            .clone()
            .unwrap_or_else(|| config.dataset_dir().join(MANIFEST_FILE));
        let mut entries = read_manifest(&path).with_context(|| {
            format!("reading manifest {} (run build-dataset first)", path.display())
        })?;
        if let Some(split) = args.split {
            entries.retain(|e| e.split == split);
        }
        let dir = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Ok(Self { dir, entries })
    }

    pub fn processed_dir(&self) -> PathBuf {
        self.dir.join("processed")
    }

    pub fn transparency_dir(&self) -> PathBuf {
        self.dir.join("anc")
    }

    pub fn eval_dir(&self) -> PathBuf {
        self.dir.join("eval")
    }
}

/// Algorithm names become file-name components.
pub fn check_name(name: &str) -> Result<()> {
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        bail!("invalid algorithm name {name:?}: use letters, digits, '-' or '_'");
    }
    Ok(())
}

/// Runs `f` on every entry in parallel; all failures are listed in one error.
pub fn for_each_stimulus<F>(entries: &[ManifestEntry], what: &str, f: F) -> Result<()>
where
    F: Fn(&ManifestEntry) -> Result<()> + Sync,
{
    let failures: Vec<String> = entries
        .par_iter()
        .filter_map(|e| f(e).err().map(|err| format!("  {}: {err:#}", e.id)))
        .collect();
    if !failures.is_empty() {
        bail!(
            "{what} failed for {} of {} stimuli:\n{}",
            failures.len(),
            entries.len(),
            failures.join("\n")
        );
    }
    Ok(())
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naming_scheme() {
        let d = Path::new("d");
        assert_eq!(mix_path(d, "t3_00"), Path::new("d/t3_00_mix.wav"));
        assert_eq!(gt_path(d, "t3_00"), Path::new("d/t3_00_gt.wav"));
        assert_eq!(processed_path(d, "t3_00", "nn"), Path::new("d/t3_00_proc_nn.wav"));
        assert_eq!(transparency_path(d, "t3_00", "none"), Path::new("d/t3_00_st_none.wav"));
    }

    #[test]
    fn names_are_file_safe() {
        assert!(check_name("anc-drc_2").is_ok());
        for bad in ["", "a/b", "..", "x y"] {
            assert!(check_name(bad).is_err(), "{bad}");
        }
    }
}
