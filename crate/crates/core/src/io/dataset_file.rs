use std::path::Path;

use super::binary::{Reader, Writer};
use crate::prep::{Dataset, RepetitionSample};
use crate::{ClassLabel, Error, MultivariateSeries, Result};

pub const DATASET_MAGIC: &[u8; 8] = b"REPCLSD\0";
pub const DATASET_VERSION: u32 = 1;

/// Payload after the envelope header:
///
/// ```text
/// config_hash        str
/// channel_names      u64 count, str each
/// length             u64
/// n_samples          u64
/// per sample:        label u8 (0 N, 1 A, 2 R, 3 Arch), participant_id str,
///                    clip_id str, rep_index u64,
///                    channels * length f64, channel-major
/// ```
pub fn encode_dataset(dataset: &Dataset) -> Vec<u8> {
    let mut w = Writer::new(DATASET_MAGIC, DATASET_VERSION);
    w.str(&dataset.config_hash);
    w.strs(&dataset.channel_names);
    w.usize(dataset.length);
    w.usize(dataset.len());
    for s in dataset.samples() {
        w.u8(s.label.index() as u8);
        w.str(&s.participant_id);
        w.str(&s.clip_id);
        w.usize(s.rep_index);
        for channel in s.series.channels() {
            channel.iter().for_each(|v| w.f64(*v));
        }
    }
    w.finish()
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Dataset> {
    let mut r = Reader::open(bytes, DATASET_MAGIC, DATASET_VERSION, "dataset")?;
    let config_hash = r.str()?;
    let names = r.strs()?;
    let length = r.usize()?;
    let n = r.usize()?;
    let mut dataset = Dataset::new(names.clone(), length, config_hash);
    for _ in 0..n {
        let label = ClassLabel::from_index(r.u8()? as usize).ok_or_else(|| Error::Format("bad class index".into()))?;
        let participant_id = r.str()?;
        let clip_id = r.str()?;
        let rep_index = r.usize()?;
        let channels = (0..names.len()).map(|_| r.f64_array(length)).collect::<Result<Vec<_>>>()?;
        let series = MultivariateSeries::new(names.clone(), channels).map_err(|e| Error::Format(e.to_string()))?;
        dataset
            .push(RepetitionSample { series, label, participant_id, clip_id, rep_index })
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    r.finish()?;
    Ok(dataset)
}

pub fn save_dataset(path: &Path, dataset: &Dataset) -> Result<()> {
    super::write_atomic(path, &encode_dataset(dataset))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_dataset(&bytes).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        e => e,
    })
}
