//! Repetition-level exercise classification from 2D pose keypoint sequences.
//!
//! The pipeline turns per-frame body keypoints into a multivariate time series,
//! cuts it into single repetitions, resamples every repetition to a fixed
//! length and classifies it with random convolutional kernel features feeding
//! a ridge-regularised linear classifier.
//!
//! Module map:
//!
//! * [`pose`]: keypoint document parsing, clip loading, channel extraction, quality gate
//! * [`prep`]: smoothing, peak detection, segmentation, resampling, normalisation, channel ranking
//! * [`rocket`]: ROCKET and MiniROCKET feature transforms
//! * [`linear`]: feature scaling and the ridge classifier with closed-form leave-one-out CV
//! * [`eval`]: participant-grouped splits and metrics
//! * [`synth`]: synthetic overhead-press fixture generator
//! * [`pipeline`], [`config`], [`io`], [`cli`]: orchestration, persistence and commands

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod io;
pub mod label;
pub mod linear;
pub mod pipeline;
pub mod pose;
pub mod prep;
pub mod rocket;
pub mod series;
pub mod synth;

pub use error::{Error, Result};
pub use label::ClassLabel;
pub use series::MultivariateSeries;
