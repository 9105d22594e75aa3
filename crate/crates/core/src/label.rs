use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Execution class of one overhead-press repetition.
///
/// `N` normal, `A` asymmetrical (lopsided bar), `R` reduced range of motion,
/// `Arch` arched back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    N,
    A,
    R,
    Arch,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 4] = [ClassLabel::N, ClassLabel::A, ClassLabel::R, ClassLabel::Arch];

    pub fn index(self) -> usize {
        match self {
            ClassLabel::N => 0,
            ClassLabel::A => 1,
            ClassLabel::R => 2,
            ClassLabel::Arch => 3,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::N => "N",
            ClassLabel::A => "A",
            ClassLabel::R => "R",
            ClassLabel::Arch => "Arch",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel(pub String);

impl fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown class label `{}` (expected N, A, R or Arch)", self.0)
    }
}

impl std::error::Error for UnknownLabel {}

impl FromStr for ClassLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" | "normal" => Ok(ClassLabel::N),
            "a" | "asymmetrical" | "asymmetric" => Ok(ClassLabel::A),
            "r" | "reduced" => Ok(ClassLabel::R),
            "arch" => Ok(ClassLabel::Arch),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for label in ClassLabel::ALL {
            assert_eq!(ClassLabel::from_index(label.index()), Some(label));
            assert_eq!(label.as_str().parse::<ClassLabel>().unwrap(), label);
        }
        assert_eq!(ClassLabel::from_index(4), None);
        assert!("arched".parse::<ClassLabel>().is_err());
    }
}
