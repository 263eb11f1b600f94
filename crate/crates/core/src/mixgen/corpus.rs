use std::collections::HashMap;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use super::{Category, ClipStore, SourceClip};
use crate::error::{Error, Result};
use crate::resample::resample;
use crate::wav::{read_wav, write_wav};

pub const LABELS_FILE: &str = "labels.csv";

#[derive(Debug, Serialize, Deserialize)]
struct LabelRow {
    filename: String,
    label: String,
    category: String,
}

/// Files that were not loaded, with the reason.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub skipped: Vec<(PathBuf, String)>,
}

impl IngestReport {
    pub fn warnings(&self) -> usize {
        self.skipped.len()
    }
}

/// Loads every mapped WAV in `dir` at `sample_rate`, keyed by file stem.
///
/// `label_map` has header `filename,label,category`. Unmapped or unreadable
/// files are skipped with a warning; mapping rows without a file are an error.
pub fn ingest_corpus(
    dir: impl AsRef<Path>,
    label_map: impl AsRef<Path>,
    sample_rate: u32,
) -> Result<(ClipStore, IngestReport)> {
    let dir = dir.as_ref();
    let label_map = label_map.as_ref();
    let mut reader = csv::Reader::from_path(label_map).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(label_map, io),
        other => Error::Csv {
            row: 1,
            reason: format!("{other:?}"),
        },
    })?;
    let mut mapping: HashMap<String, (String, Category)> = HashMap::new();
    for (i, row) in reader.deserialize::<LabelRow>().enumerate() {
        let row = row.map_err(|e| Error::Csv {
            row: i + 2,
            reason: e.to_string(),
        })?;
        let category = row.category.parse().map_err(|e: Error| Error::Csv {
            row: i + 2,
            reason: e.to_string(),
        })?;
        if !dir.join(&row.filename).is_file() {
            return Err(Error::Csv {
                row: i + 2,
                reason: format!("mapped file {} not found in {}", row.filename, dir.display()),
            });
        }
        mapping.insert(row.filename, (row.label, category));
    }

    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .is_some_and(|x| x.eq_ignore_ascii_case("wav"))
        })
        .collect();
    files.sort();

    let mut store = ClipStore::new();
    let mut report = IngestReport::default();
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let Some((label, category)) = mapping.get(&name) else {
            warn!("{}: no label mapping, skipped", path.display());
            report.skipped.push((path, "no label mapping".into()));
            continue;
        };
        let audio = match read_wav(&path).and_then(|a| resample(&a, sample_rate)) {
            Ok(a) => a,
            Err(e) => {
                warn!("{}: {e}, skipped", path.display());
                report.skipped.push((path, e.to_string()));
                continue;
            }
        };
        let id = path.file_stem().unwrap().to_string_lossy().into_owned();
        store.insert(SourceClip {
            id,
            label: label.clone(),
            category: *category,
            audio,
        })?;
    }
    Ok((store, report))
}

/// Writes `<id>.wav` per clip plus a label map, in store order.
pub fn write_corpus(dir: impl AsRef<Path>, store: &ClipStore) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let labels = dir.join(LABELS_FILE);
    let mut w = csv::Writer::from_path(&labels).map_err(|e| Error::Csv {
        row: 0,
        reason: format!("{}: {e}", labels.display()),
    })?;
    // header even for an empty corpus
    w.write_record(["filename", "label", "category"])
        .and_then(|_| {
            for clip in store.iter() {
                w.write_record([
                    format!("{}.wav", clip.id),
                    clip.label.clone(),
                    clip.category.to_string(),
                ])?;
            }
            w.flush().map_err(csv::Error::from)
        })
        .map_err(|e| Error::Csv {
            row: 0,
            reason: format!("{}: {e}", labels.display()),
        })?;
    for clip in store.iter() {
        write_wav(&clip.audio, dir.join(format!("{}.wav", clip.id)))?;
    }
    Ok(())
}
