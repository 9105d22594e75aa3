//! Manifests and the binary dataset and model files.
//!
//! Both binary files share one envelope: 8 magic bytes, a little-endian
//! `u32` format version, the payload, then the SHA-256 of everything before
//! it. Integers are little-endian `u64`, floats little-endian IEEE-754
//! binary64, strings a `u64` byte length followed by UTF-8.

mod binary;
mod dataset_file;
mod manifest;
mod model_file;

use std::fs;
use std::path::Path;

pub use dataset_file::{decode_dataset, encode_dataset, load_dataset, save_dataset, DATASET_MAGIC, DATASET_VERSION};
pub use manifest::{read_manifest, write_manifest, ManifestEntry};
pub use model_file::{decode_model, encode_model, load_model, save_model, MODEL_MAGIC, MODEL_VERSION};

use crate::{Error, Result};

/// Writes through a sibling temporary file so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = Path::new(&tmp);
    fs::write(tmp, bytes).map_err(|e| Error::io(tmp, e))?;
    fs::rename(tmp, path).map_err(|e| Error::io(path, e))
}
