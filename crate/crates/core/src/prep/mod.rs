//! Series preparation: smoothing, repetition segmentation, fixed-length
//! resampling, optional z-normalisation and channel ranking.

mod dataset;
mod ecp;
mod normalize;
mod peaks;
mod resample;
mod savgol;
mod segment;

use thiserror::Error;

pub use dataset::{Dataset, RepetitionSample};
pub use ecp::{select_channels_ecp, ChannelRanking};
pub use normalize::{znormalize, znormalize_channel};
pub use peaks::{detect_peaks, local_maxima, peak_prominences, PeakParams};
pub use resample::{resample_channel, resample_cubic, CubicSpline};
pub use savgol::{savgol_coefficients, smooth_savgol};
pub use segment::{segment_equal, segment_repetitions, Segmentation, SegmentationParams};

#[derive(Debug, Error, PartialEq)]
pub enum PrepError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("series of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("no repetitions found")]
    NoRepetitionsFound,
    #[error("anchor channel `{0}` not present in series")]
    MissingAnchor(String),
    #[error("dataset needs at least two classes")]
    DegenerateDataset,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset samples disagree on {0}")]
    InconsistentDataset(String),
}
