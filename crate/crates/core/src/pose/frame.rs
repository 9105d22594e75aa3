use serde::{Deserialize, Serialize};

use super::{PoseError, NUM_BODY_PARTS};

/// Pixel coordinates (origin top-left) plus detector confidence in `[0, 1]`.
/// Confidence `0` marks an undetected point whose coordinates carry no
/// information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl Keypoint {
    pub const UNDETECTED: Keypoint = Keypoint { x: 0.0, y: 0.0, confidence: 0.0 };

    pub fn new(x: f64, y: f64, confidence: f64) -> Self {
        Self { x, y, confidence }
    }

    pub fn is_detected(&self) -> bool {
        self.confidence > 0.0
    }
}

/// All 25 keypoints of one person in one frame, in body-table order.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointFrame {
    pub index: usize,
    pub points: [Keypoint; NUM_BODY_PARTS],
}

/// Result of parsing one frame document.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFrame {
    pub points: [Keypoint; NUM_BODY_PARTS],
    /// Number of people in the document. Only the first one is kept; more
    /// than one is reported as a warning by the loaders.
    pub people: usize,
}

#[derive(Deserialize)]
struct Document {
    people: Vec<Person>,
}

#[derive(Deserialize)]
struct Person {
    pose_keypoints_2d: Vec<f64>,
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    version: f64,
    people: [PersonOut<'a>; 1],
}

#[derive(Serialize)]
struct PersonOut<'a> {
    pose_keypoints_2d: &'a [f64],
}

pub fn parse_frame(raw: &[u8]) -> Result<ParsedFrame, PoseError> {
    let doc: Document = serde_json::from_slice(raw).map_err(|e| PoseError::MalformedDocument(e.to_string()))?;
    let person = doc.people.first().ok_or(PoseError::NoPersonDetected)?;
    let flat = &person.pose_keypoints_2d;
    if flat.len() != NUM_BODY_PARTS * 3 {
        return Err(PoseError::MalformedDocument(format!(
            "expected {} keypoint values, found {}",
            NUM_BODY_PARTS * 3,
            flat.len()
        )));
    }
    let mut points = [Keypoint::UNDETECTED; NUM_BODY_PARTS];
    for (part, triple) in flat.chunks_exact(3).enumerate() {
        let (x, y, c) = (triple[0], triple[1], triple[2]);
        if !(x.is_finite() && y.is_finite()) {
            return Err(PoseError::MalformedDocument(format!("non-finite coordinate for part {part}")));
        }
        if !(0.0..=1.0).contains(&c) {
            return Err(PoseError::MalformedDocument(format!("confidence {c} for part {part} outside [0, 1]")));
        }
        points[part] = Keypoint::new(x, y, c);
    }
    Ok(ParsedFrame { points, people: doc.people.len() })
}

/// Writes a single-person frame document that [`parse_frame`] reads back.
pub fn serialize_frame(points: &[Keypoint; NUM_BODY_PARTS]) -> Vec<u8> {
    let flat: Vec<f64> = points.iter().flat_map(|p| [p.x, p.y, p.confidence]).collect();
    let doc = DocumentOut { version: 1.3, people: [PersonOut { pose_keypoints_2d: &flat }] };
    serde_json::to_vec(&doc).expect("frame documents always serialize")
}
