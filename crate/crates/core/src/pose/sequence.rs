use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::frame::{parse_frame, Keypoint, KeypointFrame};
use super::{PoseError, NUM_BODY_PARTS};
use crate::ClassLabel;

pub const DEFAULT_MAX_GAP: usize = 15;

/// Per-clip metadata carried alongside the frames (one manifest row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipMeta {
    pub clip_id: String,
    pub participant_id: String,
    pub class_label: Option<ClassLabel>,
    pub fps: f64,
}

impl ClipMeta {
    pub fn new(clip_id: impl Into<String>, participant_id: impl Into<String>) -> Self {
        Self { clip_id: clip_id.into(), participant_id: participant_id.into(), class_label: None, fps: 30.0 }
    }

    pub fn with_label(mut self, label: ClassLabel) -> Self {
        self.class_label = Some(label);
        self
    }
}

/// One person, one clip. Frames are non-empty with strictly increasing indices.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointSequence {
    pub meta: ClipMeta,
    pub frames: Vec<KeypointFrame>,
}

impl KeypointSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    /// Longest tolerated run of frames with no detected person.
    pub max_gap: usize,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { max_gap: DEFAULT_MAX_GAP }
    }
}

/// What happened while a clip was assembled.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    pub frames: usize,
    pub missing_person_frames: usize,
    pub multi_person_frames: usize,
    pub interpolated_points: usize,
}

/// Reads the raw per-frame documents of a clip.
///
/// `source` is either a directory holding one `*.json` document per frame, or
/// a `.jsonl` bundle with one document per line. In a directory the frame
/// index is the last run of digits in the file stem (`clip_000000000042_keypoints.json`
/// is frame 42); files without digits are numbered by lexicographic order.
pub fn read_frame_documents(source: &Path) -> Result<Vec<(usize, Vec<u8>)>, PoseError> {
    let wrap = |path: &Path, source: std::io::Error| PoseError::Io { path: path.display().to_string(), source };

    if source.is_file() {
        let text = fs::read(source).map_err(|e| wrap(source, e))?;
        return Ok(text
            .split(|&b| b == b'\n')
            .filter(|line| line.iter().any(|b| !b.is_ascii_whitespace()))
            .enumerate()
            .map(|(i, line)| (i, line.to_vec()))
            .collect());
    }

    let mut names = Vec::new();
    for entry in fs::read_dir(source).map_err(|e| wrap(source, e))? {
        let path = entry.map_err(|e| wrap(source, e))?.path();
        if path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("json")) {
            names.push(path);
        }
    }
    names.sort();
    names
        .into_iter()
        .enumerate()
        .map(|(position, path)| {
            let index = path.file_stem().and_then(|s| s.to_str()).and_then(trailing_number).unwrap_or(position);
            let bytes = fs::read(&path).map_err(|e| wrap(&path, e))?;
            Ok((index, bytes))
        })
        .collect()
}

fn trailing_number(stem: &str) -> Option<usize> {
    let bytes = stem.as_bytes();
    let end = bytes.iter().rposition(|b| b.is_ascii_digit())? + 1;
    let start = bytes[..end].iter().rposition(|b| !b.is_ascii_digit()).map_or(0, |i| i + 1);
    stem[start..end].parse().ok()
}

/// Loads a clip from disk; see [`read_frame_documents`] and [`assemble_sequence`].
pub fn load_sequence(
    source: &Path,
    meta: ClipMeta,
    options: &LoadOptions,
) -> Result<(KeypointSequence, LoadReport), PoseError> {
    let docs = read_frame_documents(source)?;
    let mut frames = Vec::with_capacity(docs.len());
    let mut multi = 0;
    for (index, raw) in docs {
        match parse_frame(&raw) {
            Ok(parsed) => {
                if parsed.people > 1 {
                    multi += 1;
                }
                frames.push((index, Some(parsed.points)));
            }
            Err(PoseError::NoPersonDetected) => frames.push((index, None)),
            Err(e) => return Err(e),
        }
    }
    if multi > 0 {
        log::warn!("clip {}: {multi} frames with more than one person, kept person 0", meta.clip_id);
    }
    let (seq, mut report) = assemble_sequence(meta, frames, options)?;
    report.multi_person_frames = multi;
    Ok((seq, report))
}

/// Builds a sequence from `(frame index, keypoints or no person)` pairs.
///
/// Frames are sorted by index. Every keypoint with confidence 0, including
/// all points of frames without a person, is replaced by linear
/// interpolation (in frame-index time) between the nearest detected frames of
/// that body part and keeps confidence 0. Leading and trailing runs copy the
/// nearest detection. A run of more than `max_gap` person-less frames fails.
pub fn assemble_sequence(
    meta: ClipMeta,
    mut frames: Vec<(usize, Option<[Keypoint; NUM_BODY_PARTS]>)>,
    options: &LoadOptions,
) -> Result<(KeypointSequence, LoadReport), PoseError> {
    if frames.is_empty() {
        return Err(PoseError::EmptyClip);
    }
    frames.sort_by_key(|(index, _)| *index);
    if let Some(w) = frames.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(PoseError::DuplicateFrame(w[0].0));
    }

    let mut report = LoadReport { frames: frames.len(), ..LoadReport::default() };
    let mut run = 0;
    for (position, (_, points)) in frames.iter().enumerate() {
        if points.is_none() {
            report.missing_person_frames += 1;
            run += 1;
            if run > options.max_gap {
                let start = frames[position + 1 - run].0;
                return Err(PoseError::GapTooLarge { start, run, limit: options.max_gap });
            }
        } else {
            run = 0;
        }
    }
    if report.missing_person_frames == frames.len() {
        return Err(PoseError::EmptyClip);
    }

    let indices: Vec<usize> = frames.iter().map(|(i, _)| *i).collect();
    let mut points: Vec<[Keypoint; NUM_BODY_PARTS]> =
        frames.into_iter().map(|(_, p)| p.unwrap_or([Keypoint::UNDETECTED; NUM_BODY_PARTS])).collect();

    for part in 0..NUM_BODY_PARTS {
        let detected: Vec<usize> = (0..points.len()).filter(|&t| points[t][part].is_detected()).collect();
        if detected.is_empty() {
            continue;
        }
        let mut next = 0;
        for t in 0..points.len() {
            if points[t][part].is_detected() {
                continue;
            }
            while next < detected.len() && detected[next] < t {
                next += 1;
            }
            let (x, y) = match (next.checked_sub(1).map(|k| detected[k]), detected.get(next)) {
                (Some(a), Some(&b)) => {
                    let (pa, pb) = (points[a][part], points[b][part]);
                    let w = (indices[t] - indices[a]) as f64 / (indices[b] - indices[a]) as f64;
                    (pa.x + w * (pb.x - pa.x), pa.y + w * (pb.y - pa.y))
                }
                (Some(a), None) => (points[a][part].x, points[a][part].y),
                (None, Some(&b)) => (points[b][part].x, points[b][part].y),
                (None, None) => unreachable!("part has at least one detection"),
            };
            points[t][part] = Keypoint::new(x, y, 0.0);
            report.interpolated_points += 1;
        }
    }

    let frames = indices.into_iter().zip(points).map(|(index, points)| KeypointFrame { index, points }).collect();
    Ok((KeypointSequence { meta, frames }, report))
}
