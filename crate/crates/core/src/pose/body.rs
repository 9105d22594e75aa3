use std::fmt;

pub const NUM_BODY_PARTS: usize = 25;

/// One entry of the 25-part body layout. `index` is the slot in the flat
/// keypoint array divided by three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BodyPart {
    pub index: usize,
    /// Short identifier used in channel names, e.g. `RWrist`.
    pub key: &'static str,
    pub name: &'static str,
}

pub static BODY_PARTS: [BodyPart; NUM_BODY_PARTS] = [
    BodyPart { index: 0, key: "Nose", name: "Nose" },
    BodyPart { index: 1, key: "Neck", name: "Neck" },
    BodyPart { index: 2, key: "RShoulder", name: "Right Shoulder" },
    BodyPart { index: 3, key: "RElbow", name: "Right Elbow" },
    BodyPart { index: 4, key: "RWrist", name: "Right Wrist" },
    BodyPart { index: 5, key: "LShoulder", name: "Left Shoulder" },
    BodyPart { index: 6, key: "LElbow", name: "Left Elbow" },
    BodyPart { index: 7, key: "LWrist", name: "Left Wrist" },
    BodyPart { index: 8, key: "MidHip", name: "Mid Hip" },
    BodyPart { index: 9, key: "RHip", name: "Right Hip" },
    BodyPart { index: 10, key: "RKnee", name: "Right Knee" },
    BodyPart { index: 11, key: "RAnkle", name: "Right Ankle" },
    BodyPart { index: 12, key: "LHip", name: "Left Hip" },
    BodyPart { index: 13, key: "LKnee", name: "Left Knee" },
    BodyPart { index: 14, key: "LAnkle", name: "Left Ankle" },
    BodyPart { index: 15, key: "REye", name: "Right Eye" },
    BodyPart { index: 16, key: "LEye", name: "Left Eye" },
    BodyPart { index: 17, key: "REar", name: "Right Ear" },
    BodyPart { index: 18, key: "LEar", name: "Left Ear" },
    BodyPart { index: 19, key: "LBigToe", name: "Left Big Toe" },
    BodyPart { index: 20, key: "LSmallToe", name: "Left Small Toe" },
    BodyPart { index: 21, key: "LHeel", name: "Left Heel" },
    BodyPart { index: 22, key: "RBigToe", name: "Right Big Toe" },
    BodyPart { index: 23, key: "RSmallToe", name: "Right Small Toe" },
    BodyPart { index: 24, key: "RHeel", name: "Right Heel" },
];

impl BodyPart {
    pub const NOSE: usize = 0;
    pub const NECK: usize = 1;
    pub const R_SHOULDER: usize = 2;
    pub const R_ELBOW: usize = 3;
    pub const R_WRIST: usize = 4;
    pub const L_SHOULDER: usize = 5;
    pub const L_ELBOW: usize = 6;
    pub const L_WRIST: usize = 7;
    pub const MID_HIP: usize = 8;
    pub const R_HIP: usize = 9;
    pub const L_HIP: usize = 12;

    pub fn get(index: usize) -> Option<&'static BodyPart> {
        BODY_PARTS.get(index)
    }

    pub fn by_key(key: &str) -> Option<&'static BodyPart> {
        BODY_PARTS.iter().find(|p| p.key.eq_ignore_ascii_case(key))
    }
}

impl fmt::Display for BodyPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.index, self.name)
    }
}
