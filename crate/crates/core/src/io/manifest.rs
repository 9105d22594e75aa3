use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::pose::ClipMeta;
use crate::{ClassLabel, Error, Result};

fn default_fps() -> f64 {
    30.0
}

/// One clip: where its keypoint documents live and who performed what.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub clip_id: String,
    pub participant_id: String,
    /// Empty for unlabelled clips.
    pub class_label: Option<ClassLabel>,
    /// Directory of per-frame JSON documents or a `.jsonl` bundle; relative
    /// paths resolve against the manifest's directory.
    pub path: PathBuf,
    #[serde(default = "default_fps")]
    pub fps: f64,
}

impl ManifestEntry {
    pub fn from_meta(meta: &ClipMeta, path: impl Into<PathBuf>) -> Self {
        Self {
            clip_id: meta.clip_id.clone(),
            participant_id: meta.participant_id.clone(),
            class_label: meta.class_label,
            path: path.into(),
            fps: meta.fps,
        }
    }

    pub fn meta(&self) -> ClipMeta {
        ClipMeta {
            clip_id: self.clip_id.clone(),
            participant_id: self.participant_id.clone(),
            class_label: self.class_label,
            fps: self.fps,
        }
    }
}

/// Reads a CSV manifest, or a JSON array of rows when the extension is `.json`.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let bad = |msg: String| Error::Format(format!("manifest {}: {msg}", path.display()));
    let entries: Vec<ManifestEntry> = if path.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&text).map_err(|e| bad(e.to_string()))?
    } else {
        let mut reader =
            csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                other => bad(format!("{other:?}")),
            })?;
        reader.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| bad(e.to_string()))?
    };
    let mut seen = std::collections::BTreeSet::new();
    for e in &entries {
        if !seen.insert(&e.clip_id) {
            return Err(bad(format!("duplicate clip_id {}", e.clip_id)));
        }
    }
    Ok(entries)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in entries {
        w.serialize(e).map_err(|err| Error::Format(err.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|err| Error::Format(err.to_string()))?;
    super::write_atomic(path, &bytes)
}
