//! Synthetic overhead-press keypoint clips with class-coded technique faults.
//!
//! Every participant records one clip per class. A clip is a still lead-in,
//! `reps_per_clip` raised-cosine press cycles and a still lead-out. Wrists and
//! elbows carry the motion; the rest of the skeleton holds still under pixel
//! noise. Class faults:
//!
//! * `A`: the left arm travels `asymmetry_ratio` of the right arm's distance
//! * `R`: both arms travel `reduced_range_scale` of the full distance and stop
//!   short of the shoulders on the way down
//! * `Arch`: the hips drift sideways by up to `arch_drift_px` during each lift

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::ManifestEntry;
use crate::pose::{serialize_frame, BodyPart, ClipMeta, Keypoint, KeypointFrame, KeypointSequence, NUM_BODY_PARTS};
use crate::ClassLabel;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic config: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// Participants per class; each one records every class.
    pub participants: usize,
    pub reps_per_clip: usize,
    pub fps: f64,
    /// Mean repetition period in seconds.
    pub base_period_s: f64,
    /// Per-participant tempo jitter, as a fraction of the base period.
    pub period_jitter: f64,
    /// Wrist travel of a full repetition at body scale 1.
    pub amplitude_px: f64,
    pub noise_sd_px: f64,
    pub asymmetry_ratio: f64,
    pub reduced_range_scale: f64,
    pub arch_drift_px: f64,
    /// Still frames before the first and after the last repetition.
    pub lead_in_s: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            participants: 10,
            reps_per_clip: 10,
            fps: 30.0,
            base_period_s: 3.0,
            period_jitter: 0.2,
            amplitude_px: 120.0,
            noise_sd_px: 3.0,
            asymmetry_ratio: 0.7,
            reduced_range_scale: 0.6,
            arch_drift_px: 25.0,
            lead_in_s: 0.75,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let positive = [
            ("fps", self.fps),
            ("base_period_s", self.base_period_s),
            ("amplitude_px", self.amplitude_px),
            ("asymmetry_ratio", self.asymmetry_ratio),
            ("reduced_range_scale", self.reduced_range_scale),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(SynthError::InvalidParams(format!("{name} must be positive, got {v}")));
        }
        let non_negative =
            [("noise_sd_px", self.noise_sd_px), ("arch_drift_px", self.arch_drift_px), ("lead_in_s", self.lead_in_s)];
        if let Some((name, v)) = non_negative.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(SynthError::InvalidParams(format!("{name} must be non-negative, got {v}")));
        }
        if self.participants == 0 || self.reps_per_clip == 0 {
            return Err(SynthError::InvalidParams("participants and reps_per_clip must be positive".into()));
        }
        if !(0.0..0.5).contains(&self.period_jitter) {
            return Err(SynthError::InvalidParams("period_jitter must lie in [0, 0.5)".into()));
        }
        if self.asymmetry_ratio > 1.0 || self.reduced_range_scale > 1.0 {
            return Err(SynthError::InvalidParams("asymmetry_ratio and reduced_range_scale must not exceed 1".into()));
        }
        if self.base_period_s * (1.0 - self.period_jitter) * self.fps < 8.0 {
            return Err(SynthError::InvalidParams("repetitions shorter than 8 frames".into()));
        }
        Ok(())
    }
}

/// Body geometry and habits of one synthetic participant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticipantProfile {
    pub index: usize,
    pub id: String,
    pub center_x: f64,
    pub shoulder_y: f64,
    pub scale: f64,
    pub period_s: f64,
    /// Natural left/right travel ratio, close to 1.
    pub left_bias: f64,
    /// Natural sideways hip sway per lift.
    pub hip_sway_px: f64,
}

const PROFILE_STREAM: u64 = 1 << 32;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn participant_id(index: usize) -> String {
    format!("P{:02}", index + 1)
}

pub fn clip_id(participant: &str, label: ClassLabel) -> String {
    format!("{participant}_{label}")
}

pub fn participant_profile(config: &SynthConfig, index: usize) -> ParticipantProfile {
    let mut rng = stream_rng(config.seed, PROFILE_STREAM + index as u64);
    let j = config.period_jitter;
    ParticipantProfile {
        index,
        id: participant_id(index),
        center_x: rng.random_range(560.0..720.0),
        shoulder_y: rng.random_range(300.0..360.0),
        scale: rng.random_range(0.75..1.25),
        period_s: config.base_period_s * if j > 0.0 { rng.random_range(1.0 - j..1.0 + j) } else { 1.0 },
        left_bias: rng.random_range(0.97..1.03),
        hip_sway_px: rng.random_range(0.0..3.0),
    }
}

/// Resting skeleton offsets from `(center_x, shoulder_y)` at scale 1, in
/// body-part order. Right-side parts sit at smaller image x.
const REST_POSE: [(f64, f64); NUM_BODY_PARTS] = [
    (0.0, -75.0),   // Nose
    (0.0, -10.0),   // Neck
    (-62.0, 0.0),   // RShoulder
    (-86.0, 55.0),  // RElbow
    (-72.0, -5.0),  // RWrist
    (62.0, 0.0),    // LShoulder
    (86.0, 55.0),   // LElbow
    (72.0, -5.0),   // LWrist
    (0.0, 230.0),   // MidHip
    (-40.0, 230.0), // RHip
    (-44.0, 400.0), // RKnee
    (-46.0, 560.0), // RAnkle
    (40.0, 230.0),  // LHip
    (44.0, 400.0),  // LKnee
    (46.0, 560.0),  // LAnkle
    (-14.0, -88.0), // REye
    (14.0, -88.0),  // LEye
    (-30.0, -82.0), // REar
    (30.0, -82.0),  // LEar
    (60.0, 590.0),  // LBigToe
    (70.0, 586.0),  // LSmallToe
    (44.0, 575.0),  // LHeel
    (-60.0, 590.0), // RBigToe
    (-70.0, 586.0), // RSmallToe
    (-44.0, 575.0), // RHeel
];

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Lift phase per frame, in `[0, 1]`: zero during the lead-in and lead-out,
/// one raised-cosine cycle per repetition. Also returns each repetition's
/// travel multiplier.
fn lift_profile(
    profile: &ParticipantProfile,
    config: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<usize>, Vec<f64>) {
    let still = (config.lead_in_s * config.fps).round() as usize;
    let mut phase = vec![0.0; still];
    let mut rep_of_frame = vec![0; still];
    let mut travel = Vec::with_capacity(config.reps_per_clip);
    for rep in 0..config.reps_per_clip {
        let frames = (profile.period_s * config.fps * rng.random_range(0.95..1.05)).round() as usize;
        travel.push(rng.random_range(0.96..1.04));
        for f in 0..frames {
            phase.push((1.0 - (2.0 * PI * f as f64 / frames as f64).cos()) / 2.0);
            rep_of_frame.push(rep);
        }
    }
    phase.extend(std::iter::repeat_n(0.0, still));
    rep_of_frame.extend(std::iter::repeat_n(config.reps_per_clip - 1, still));
    (phase, rep_of_frame, travel)
}

/// One clip of `label` performed by `profile`. Deterministic in
/// `(config.seed, profile.index, label)`.
pub fn generate_clip(
    label: ClassLabel,
    profile: &ParticipantProfile,
    config: &SynthConfig,
) -> Result<KeypointSequence, SynthError> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, profile.index as u64 * 4 + label.index() as u64);
    let noise = Normal::new(0.0, config.noise_sd_px).map_err(|e| SynthError::InvalidParams(e.to_string()))?;
    let (phase, rep_of_frame, travel) = lift_profile(profile, config, &mut rng);

    let s = profile.scale;
    let full = config.amplitude_px * s;
    let (trough, range) = match label {
        ClassLabel::R => (1.0 - config.reduced_range_scale, config.reduced_range_scale),
        _ => (0.0, 1.0),
    };
    let left_ratio = profile.left_bias * if label == ClassLabel::A { config.asymmetry_ratio } else { 1.0 };
    let drift = profile.hip_sway_px + if label == ClassLabel::Arch { config.arch_drift_px } else { 0.0 };

    let frames = phase
        .iter()
        .zip(&rep_of_frame)
        .enumerate()
        .map(|(index, (&h, &rep))| {
            let lift = full * travel[rep] * (trough + range * h);
            let mut points = [Keypoint::UNDETECTED; NUM_BODY_PARTS];
            for (part, (dx, dy)) in REST_POSE.iter().enumerate() {
                let (mut x, mut y) = (profile.center_x + dx * s, profile.shoulder_y + dy * s);
                match part {
                    BodyPart::R_WRIST => y -= lift,
                    BodyPart::L_WRIST => y -= lift * left_ratio,
                    BodyPart::R_ELBOW => {
                        y -= 0.75 * lift;
                        x += 8.0 * s * h;
                    }
                    BodyPart::L_ELBOW => {
                        y -= 0.75 * lift * left_ratio;
                        x -= 8.0 * s * h;
                    }
                    BodyPart::MID_HIP | BodyPart::R_HIP | BodyPart::L_HIP => x += drift * h,
                    _ => {}
                }
                points[part] = Keypoint {
                    x: round3(x + noise.sample(&mut rng)),
                    y: round3(y + noise.sample(&mut rng)),
                    confidence: round3(rng.random_range(0.8..1.0)),
                };
            }
            KeypointFrame { index, points }
        })
        .collect();

    let meta =
        ClipMeta { fps: config.fps, ..ClipMeta::new(clip_id(&profile.id, label), &profile.id).with_label(label) };
    Ok(KeypointSequence { meta, frames })
}

/// Every clip of the corpus, participant-major, classes in `N, A, R, Arch` order.
pub fn generate_corpus(config: &SynthConfig) -> Result<Vec<KeypointSequence>, SynthError> {
    config.validate()?;
    (0..config.participants * 4)
        .into_par_iter()
        .map(|i| generate_clip(ClassLabel::ALL[i % 4], &participant_profile(config, i / 4), config))
        .collect()
}

/// Writes the corpus under `out_dir` as `clips/<clip_id>/<clip_id>_<frame>_keypoints.json`
/// plus `manifest.csv`, and returns the manifest rows.
pub fn generate_dataset(config: &SynthConfig, out_dir: &Path) -> crate::Result<Vec<ManifestEntry>> {
    let clips = generate_corpus(config)?;
    let entries: Vec<ManifestEntry> = clips
        .par_iter()
        .map(|clip| -> crate::Result<ManifestEntry> {
            let rel = Path::new("clips").join(&clip.meta.clip_id);
            let dir = out_dir.join(&rel);
            fs::create_dir_all(&dir).map_err(|e| crate::Error::io(&dir, e))?;
            for frame in &clip.frames {
                let path = dir.join(format!("{}_{:012}_keypoints.json", clip.meta.clip_id, frame.index));
                fs::write(&path, serialize_frame(&frame.points)).map_err(|e| crate::Error::io(&path, e))?;
            }
            Ok(ManifestEntry::from_meta(&clip.meta, rel))
        })
        .collect::<crate::Result<_>>()?;
    crate::io::write_manifest(&out_dir.join("manifest.csv"), &entries)?;
    Ok(entries)
}
