//! Pose keypoint ingestion.
//!
//! Input is one JSON document per video frame in the 25-part body layout
//! (`{"people": [{"pose_keypoints_2d": [x0, y0, c0, ..., x24, y24, c24]}]}`).
//! Frames are gathered into a [`KeypointSequence`], gaps are filled by linear
//! interpolation and coordinate channels are pulled out as a
//! [`MultivariateSeries`](crate::MultivariateSeries).

mod body;
mod channels;
mod frame;
mod quality;
mod sequence;

use thiserror::Error;

pub use body::{BodyPart, BODY_PARTS, NUM_BODY_PARTS};
pub use channels::{extract_series, Axis, ChannelSpec};
pub use frame::{parse_frame, serialize_frame, Keypoint, KeypointFrame, ParsedFrame};
pub use quality::{quality_gate, PartQuality, QualityReport, QualityThresholds};
pub use sequence::{
    assemble_sequence, load_sequence, read_frame_documents, ClipMeta, KeypointSequence, LoadOptions, LoadReport,
    DEFAULT_MAX_GAP,
};

#[derive(Debug, Error)]
pub enum PoseError {
    #[error("malformed keypoint document: {0}")]
    MalformedDocument(String),
    #[error("no person detected in frame")]
    NoPersonDetected,
    #[error("clip contains no usable frames")]
    EmptyClip,
    #[error("{run} consecutive frames without a detected person starting at frame {start} (limit {limit})")]
    GapTooLarge { start: usize, run: usize, limit: usize },
    #[error("frame index {0} appears more than once")]
    DuplicateFrame(usize),
    #[error("invalid channel spec: {0}")]
    InvalidChannelSpec(String),
    #[error("frame step must be at least 1")]
    InvalidFrameStep,
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
