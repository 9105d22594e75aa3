//! Declarative pipeline configuration (TOML) and its content hashes.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eval::{DEFAULT_RATIO, DEFAULT_SEEDS};
use crate::linear::default_alpha_grid;
use crate::pose::{ChannelSpec, QualityThresholds, DEFAULT_MAX_GAP};
use crate::prep::SegmentationParams;
use crate::rocket::MiniRocketConfig;
use crate::{Error, Result};

pub const DEFAULT_TARGET_LENGTH: usize = 161;

/// Everything between keypoint files and fixed-length repetition samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepConfig {
    pub channels: ChannelSpec,
    pub frame_step: usize,
    pub target_length: usize,
    /// Per-repetition, per-channel z-normalisation.
    pub normalize: bool,
    pub max_gap: usize,
    pub quality: QualityThresholds,
    pub segmentation: SegmentationParams,
}

impl Default for PrepConfig {
    fn default() -> Self {
        Self {
            channels: ChannelSpec::upper_body(),
            frame_step: 1,
            target_length: DEFAULT_TARGET_LENGTH,
            normalize: false,
            max_gap: DEFAULT_MAX_GAP,
            quality: QualityThresholds::default(),
            segmentation: SegmentationParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Rocket,
    Minirocket,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    pub kind: TransformKind,
    /// ROCKET kernel count.
    pub num_kernels: usize,
    pub seed: u64,
    pub minirocket: MiniRocketConfig,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self { kind: TransformKind::Rocket, num_kernels: 10_000, seed: 0, minirocket: MiniRocketConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub alphas: Vec<f64>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { alphas: default_alpha_grid() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub ratio: f64,
    pub seeds: Vec<u64>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self { ratio: DEFAULT_RATIO, seeds: DEFAULT_SEEDS.to_vec() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub prep: PrepConfig,
    pub transform: TransformConfig,
    pub classifier: ClassifierConfig,
    pub evaluation: EvaluationConfig,
}

fn sha256_hex<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serialises");
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl PrepConfig {
    pub fn validate(&self) -> Result<()> {
        self.channels.validate()?;
        self.segmentation.validate()?;
        if self.frame_step == 0 {
            return Err(Error::Config("frame_step must be at least 1".into()));
        }
        if self.target_length < 12 {
            return Err(Error::Config("target_length must be at least 12".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding; stamped into datasets.
    pub fn hash(&self) -> String {
        sha256_hex(self)
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.prep.validate()?;
        if self.transform.num_kernels == 0 {
            return Err(Error::Config("num_kernels must be at least 1".into()));
        }
        if self.classifier.alphas.is_empty() || self.classifier.alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Config("alphas must be a non-empty list of positive numbers".into()));
        }
        if !(self.evaluation.ratio > 0.0 && self.evaluation.ratio <= 1.0) {
            return Err(Error::Config("evaluation ratio must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn prep_hash(&self) -> String {
        self.prep.hash()
    }

    /// Hash of the full configuration; stamped into models.
    pub fn hash(&self) -> String {
        sha256_hex(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_defaults() {
        let config = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml_str(&config.to_toml()).unwrap(), config);
        let partial =
            PipelineConfig::from_toml_str("[prep]\nframe_step = 3\n[transform]\nkind = \"minirocket\"\n").unwrap();
        assert_eq!(partial.prep.frame_step, 3);
        assert_eq!(partial.prep.target_length, 161);
        assert_eq!(partial.transform.kind, TransformKind::Minirocket);
        assert_eq!(partial.evaluation.seeds, vec![0, 1, 2]);
    }

    #[test]
    fn hashes_track_content() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.transform.seed = 9;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.prep_hash(), b.prep_hash());
        b.prep.normalize = true;
        assert_ne!(a.prep_hash(), b.prep_hash());
        assert_eq!(a.prep_hash().len(), 64);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(PipelineConfig::from_toml_str("[prep]\nframe_step = 0\n"), Err(Error::Config(_))));
        assert!(PipelineConfig::from_toml_str("[prep]\nbogus = 1\n").is_err());
        assert!(PipelineConfig::from_toml_str("[classifier]\nalphas = []\n").is_err());
    }
}
