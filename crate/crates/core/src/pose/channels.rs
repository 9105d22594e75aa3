use serde::{Deserialize, Serialize};

use super::{BodyPart, KeypointSequence, PoseError, NUM_BODY_PARTS};
use crate::MultivariateSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn suffix(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// Which body parts and which axes become series channels.
///
/// Channel order is parts-major: `[p0.x, p0.y, p1.x, p1.y, ...]` for
/// `axes = [X, Y]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub parts: Vec<usize>,
    pub axes: Vec<Axis>,
}

impl ChannelSpec {
    pub fn new(parts: Vec<usize>, axes: Vec<Axis>) -> Result<Self, PoseError> {
        let spec = Self { parts, axes };
        spec.validate()?;
        Ok(spec)
    }

    /// Shoulders, elbows, wrists and hips, X and Y: 16 channels.
    pub fn upper_body() -> Self {
        Self {
            parts: vec![
                BodyPart::R_SHOULDER,
                BodyPart::R_ELBOW,
                BodyPart::R_WRIST,
                BodyPart::L_SHOULDER,
                BodyPart::L_ELBOW,
                BodyPart::L_WRIST,
                BodyPart::R_HIP,
                BodyPart::L_HIP,
            ],
            axes: vec![Axis::X, Axis::Y],
        }
    }

    /// Every body part, X and Y: 50 channels.
    pub fn all_parts() -> Self {
        Self { parts: (0..NUM_BODY_PARTS).collect(), axes: vec![Axis::X, Axis::Y] }
    }

    pub fn validate(&self) -> Result<(), PoseError> {
        if self.parts.is_empty() || self.axes.is_empty() {
            return Err(PoseError::InvalidChannelSpec("parts and axes must be non-empty".into()));
        }
        let mut seen = [false; NUM_BODY_PARTS];
        for &part in &self.parts {
            if part >= NUM_BODY_PARTS {
                return Err(PoseError::InvalidChannelSpec(format!("body part {part} out of range 0..24")));
            }
            if std::mem::replace(&mut seen[part], true) {
                return Err(PoseError::InvalidChannelSpec(format!("body part {part} listed twice")));
            }
        }
        if self.axes.len() == 2 && self.axes[0] == self.axes[1] {
            return Err(PoseError::InvalidChannelSpec("axis listed twice".into()));
        }
        if self.axes.len() > 2 {
            return Err(PoseError::InvalidChannelSpec("at most two axes".into()));
        }
        Ok(())
    }

    pub fn n_channels(&self) -> usize {
        self.parts.len() * self.axes.len()
    }

    pub fn channel_name(part: usize, axis: Axis) -> String {
        format!("{}.{}", BodyPart::get(part).map_or("?", |p| p.key), axis.suffix())
    }

    pub fn channel_names(&self) -> Vec<String> {
        self.parts.iter().flat_map(|&p| self.axes.iter().map(move |&a| Self::channel_name(p, a))).collect()
    }
}

/// Pixel-unit coordinate channels, taking every `frame_step`-th frame.
/// Output length is `ceil(frames / frame_step)`.
pub fn extract_series(
    seq: &KeypointSequence,
    spec: &ChannelSpec,
    frame_step: usize,
) -> Result<MultivariateSeries, PoseError> {
    spec.validate()?;
    if frame_step == 0 {
        return Err(PoseError::InvalidFrameStep);
    }
    if seq.is_empty() {
        return Err(PoseError::EmptyClip);
    }
    let frames: Vec<_> = seq.frames.iter().step_by(frame_step).collect();
    let mut channels = Vec::with_capacity(spec.n_channels());
    for &part in &spec.parts {
        for &axis in &spec.axes {
            channels.push(
                frames
                    .iter()
                    .map(|f| match axis {
                        Axis::X => f.points[part].x,
                        Axis::Y => f.points[part].y,
                    })
                    .collect(),
            );
        }
    }
    MultivariateSeries::new(spec.channel_names(), channels).map_err(|e| PoseError::MalformedDocument(e.to_string()))
}
