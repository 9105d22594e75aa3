use std::collections::BTreeSet;

use super::PrepError;
use crate::{ClassLabel, MultivariateSeries};

/// One fixed-length repetition with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionSample {
    pub series: MultivariateSeries,
    pub label: ClassLabel,
    pub participant_id: String,
    pub clip_id: String,
    pub rep_index: usize,
}

/// Repetitions sharing one channel set and one length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub channel_names: Vec<String>,
    pub length: usize,
    /// Hash of the preprocessing configuration that produced the samples.
    pub config_hash: String,
    samples: Vec<RepetitionSample>,
}

impl Dataset {
    pub fn new(channel_names: Vec<String>, length: usize, config_hash: impl Into<String>) -> Self {
        Self { channel_names, length, config_hash: config_hash.into(), samples: Vec::new() }
    }

    pub fn from_samples(
        channel_names: Vec<String>,
        length: usize,
        config_hash: impl Into<String>,
        samples: impl IntoIterator<Item = RepetitionSample>,
    ) -> Result<Self, PrepError> {
        let mut ds = Self::new(channel_names, length, config_hash);
        for s in samples {
            ds.push(s)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, sample: RepetitionSample) -> Result<(), PrepError> {
        if sample.series.names() != self.channel_names.as_slice() {
            return Err(PrepError::InconsistentDataset(format!(
                "channels of clip {} rep {}",
                sample.clip_id, sample.rep_index
            )));
        }
        if sample.series.len() != self.length {
            return Err(PrepError::InconsistentDataset(format!(
                "length {} of clip {} rep {} (dataset length {})",
                sample.series.len(),
                sample.clip_id,
                sample.rep_index,
                self.length
            )));
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn samples(&self) -> &[RepetitionSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn labels(&self) -> Vec<ClassLabel> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn classes(&self) -> BTreeSet<ClassLabel> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Sorted unique participant ids.
    pub fn participants(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.samples.iter().map(|s| s.participant_id.as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    pub fn class_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for s in &self.samples {
            counts[s.label.index()] += 1;
        }
        counts
    }

    /// Samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            channel_names: self.channel_names.clone(),
            length: self.length,
            config_hash: self.config_hash.clone(),
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }

    /// Keeps only the given channels, in the given order.
    pub fn select_channels(&self, channels: &[usize]) -> Self {
        Self {
            channel_names: channels.iter().map(|&c| self.channel_names[c].clone()).collect(),
            length: self.length,
            config_hash: self.config_hash.clone(),
            samples: self
                .samples
                .iter()
                .map(|s| RepetitionSample { series: s.series.select(channels), ..s.clone() })
                .collect(),
        }
    }
}

impl AsRef<MultivariateSeries> for RepetitionSample {
    fn as_ref(&self) -> &MultivariateSeries {
        &self.series
    }
}
