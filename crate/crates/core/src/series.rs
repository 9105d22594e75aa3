use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("a series needs at least one channel")]
    NoChannels,
    #[error("{names} channel names for {channels} channels")]
    NameCount { names: usize, channels: usize },
    #[error("channel `{name}` has length {found}, expected {expected}")]
    RaggedChannels { name: String, expected: usize, found: usize },
    #[error("channel `{name}` holds a non-finite value at index {index}")]
    NonFinite { name: String, index: usize },
}

/// `C` named channels of equal length `T`, finite values only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultivariateSeries {
    names: Vec<String>,
    channels: Vec<Vec<f64>>,
}

impl MultivariateSeries {
    pub fn new(names: Vec<String>, channels: Vec<Vec<f64>>) -> Result<Self, SeriesError> {
        if channels.is_empty() {
            return Err(SeriesError::NoChannels);
        }
        if names.len() != channels.len() {
            return Err(SeriesError::NameCount { names: names.len(), channels: channels.len() });
        }
        let expected = channels[0].len();
        for (name, values) in names.iter().zip(&channels) {
            if values.len() != expected {
                return Err(SeriesError::RaggedChannels { name: name.clone(), expected, found: values.len() });
            }
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(SeriesError::NonFinite { name: name.clone(), index });
            }
        }
        Ok(Self { names, channels })
    }

    /// Channels named `ch0`, `ch1`, ...
    pub fn unnamed(channels: Vec<Vec<f64>>) -> Result<Self, SeriesError> {
        let names = (0..channels.len()).map(|i| format!("ch{i}")).collect();
        Self::new(names, channels)
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channel_by_name(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.channels[i].as_slice())
    }

    /// Half-open time slice `[start, end)` of every channel.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self { names: self.names.clone(), channels: self.channels.iter().map(|c| c[start..end].to_vec()).collect() }
    }

    /// Keeps the given channels in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            names: indices.iter().map(|&i| self.names[i].clone()).collect(),
            channels: indices.iter().map(|&i| self.channels[i].clone()).collect(),
        }
    }

    /// Applies `f` to each channel. `f` must preserve finiteness and length.
    pub fn map_channels<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let channels: Vec<Vec<f64>> = self.channels.iter().map(|c| f(c)).collect();
        debug_assert!(channels.iter().all(|c| c.len() == channels[0].len()));
        Self { names: self.names.clone(), channels }
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<Vec<f64>>) {
        (self.names, self.channels)
    }
}

impl AsRef<MultivariateSeries> for MultivariateSeries {
    fn as_ref(&self) -> &MultivariateSeries {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_non_finite() {
        let err = MultivariateSeries::unnamed(vec![vec![1.0, 2.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, SeriesError::RaggedChannels { found: 1, .. }));
        let err = MultivariateSeries::unnamed(vec![vec![1.0, f64::NAN]]).unwrap_err();
        assert_eq!(err, SeriesError::NonFinite { name: "ch0".into(), index: 1 });
        assert_eq!(MultivariateSeries::unnamed(vec![]).unwrap_err(), SeriesError::NoChannels);
    }

    #[test]
    fn slice_and_select() {
        let s = MultivariateSeries::unnamed(vec![vec![0.0, 1.0, 2.0], vec![3.0, 4.0, 5.0]]).unwrap();
        let t = s.slice(1, 3).select(&[1]);
        assert_eq!(t.names(), &["ch1".to_string()]);
        assert_eq!(t.channel(0), &[4.0, 5.0]);
    }
}
