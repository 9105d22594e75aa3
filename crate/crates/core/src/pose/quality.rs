use serde::{Deserialize, Serialize};

use super::{ChannelSpec, KeypointSequence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QualityThresholds {
    pub min_mean_confidence: f64,
    pub max_undetected_fraction: f64,
}

impl Default for QualityThresholds {
    fn default() -> Self {
        Self { min_mean_confidence: 0.3, max_undetected_fraction: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartQuality {
    pub part: usize,
    pub mean_confidence: f64,
    pub undetected_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    pub parts: Vec<PartQuality>,
    pub passed: bool,
}

impl QualityReport {
    pub fn failing_parts(&self, thresholds: &QualityThresholds) -> Vec<usize> {
        self.parts
            .iter()
            .filter(|p| {
                p.mean_confidence < thresholds.min_mean_confidence
                    || p.undetected_fraction > thresholds.max_undetected_fraction
            })
            .map(|p| p.part)
            .collect()
    }
}

/// Confidence statistics for the parts named in `spec`. Parts outside the
/// spec never affect the verdict.
pub fn quality_gate(seq: &KeypointSequence, spec: &ChannelSpec, thresholds: &QualityThresholds) -> QualityReport {
    let n = seq.frames.len().max(1) as f64;
    let parts: Vec<PartQuality> = spec
        .parts
        .iter()
        .map(|&part| {
            let (sum, undetected) = seq.frames.iter().fold((0.0, 0usize), |(s, u), f| {
                let c = f.points[part].confidence;
                (s + c, u + usize::from(c <= 0.0))
            });
            PartQuality { part, mean_confidence: sum / n, undetected_fraction: undetected as f64 / n }
        })
        .collect();
    let mut report = QualityReport { parts, passed: true };
    report.passed = report.failing_parts(thresholds).is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pose::{BodyPart, ClipMeta, Keypoint, KeypointFrame, NUM_BODY_PARTS};

    fn sequence(conf: impl Fn(usize, usize) -> f64) -> KeypointSequence {
        let frames = (0..50)
            .map(|i| {
                let mut points = [Keypoint::UNDETECTED; NUM_BODY_PARTS];
                for (p, kp) in points.iter_mut().enumerate() {
                    *kp = Keypoint::new(1.0, 1.0, conf(i, p));
                }
                KeypointFrame { index: i, points }
            })
            .collect();
        KeypointSequence { meta: ClipMeta::new("c", "p"), frames }
    }

    #[test]
    fn high_confidence_passes() {
        let r = quality_gate(&sequence(|_, _| 0.9), &ChannelSpec::upper_body(), &QualityThresholds::default());
        assert!(r.passed);
        assert!(r.parts.iter().all(|p| (p.mean_confidence - 0.9).abs() < 1e-12 && p.undetected_fraction == 0.0));
    }

    #[test]
    fn undetected_nose_outside_spec_passes() {
        let seq = sequence(|_, p| if p == BodyPart::NOSE { 0.0 } else { 0.9 });
        assert!(quality_gate(&seq, &ChannelSpec::upper_body(), &QualityThresholds::default()).passed);
    }

    #[test]
    fn weak_wrist_fails() {
        let seq = sequence(|_, p| if p == BodyPart::R_WRIST { 0.1 } else { 0.9 });
        let t = QualityThresholds::default();
        let r = quality_gate(&seq, &ChannelSpec::upper_body(), &t);
        assert!(!r.passed);
        assert_eq!(r.failing_parts(&t), vec![BodyPart::R_WRIST]);
    }

    #[test]
    fn undetected_fraction_limit() {
        // 11 of 50 frames undetected: 0.22 > 0.2 even though the mean stays high.
        let seq = sequence(|i, p| if p == BodyPart::L_ELBOW && i < 11 { 0.0 } else { 1.0 });
        let r = quality_gate(&seq, &ChannelSpec::upper_body(), &QualityThresholds::default());
        assert!(!r.passed);
        assert!(r.parts.iter().all(|p| (0.0..=1.0).contains(&p.undetected_fraction)));
    }
}
