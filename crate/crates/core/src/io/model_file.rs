use std::path::Path;

use super::binary::{Reader, Writer};
use crate::config::PipelineConfig;
use crate::linear::{FeatureScaler, RidgeModel};
use crate::pipeline::{FittedTransform, TrainedModel};
use crate::rocket::{generate_kernels, MiniRocketParams, RNG_ALGORITHM};
use crate::{ClassLabel, Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"REPCLSM\0";
pub const MODEL_VERSION: u32 = 1;

const TAG_ROCKET: u8 = 0;
const TAG_MINIROCKET: u8 = 1;

/// Payload after the envelope header:
///
/// ```text
/// config             str (JSON)
/// prep_hash          str
/// config_hash        str
/// channel_names      u64 count, str each
/// length             u64
/// transform tag      u8
///   0 ROCKET:        rng algorithm str, seed u64, kernels u64, channels u64,
///                    input length u64, bank checksum 32 bytes
///   1 MiniROCKET:    channels u64, input length u64, normalize u8, seed u64,
///                    dilations [u64], features_per_dilation [u64],
///                    channel combinations u64 count then [u64] each,
///                    bias_sources [u64], biases [f64]
/// scaler             mean [f64], scale [f64]
/// ridge              class indices (u64 count, u8 each), n_features u64,
///                    weights [f64] row-major features x classes,
///                    intercepts [f64], alpha f64, alpha_grid [f64],
///                    loo_errors [f64]
/// ```
///
/// `[T]` is a `u64` count followed by the items. A ROCKET bank is
/// regenerated on load and must reproduce the stored checksum.
pub fn encode_model(model: &TrainedModel) -> Vec<u8> {
    let mut w = Writer::new(MODEL_MAGIC, MODEL_VERSION);
    w.str(&serde_json::to_string(&model.config).expect("config serialises"));
    w.str(&model.prep_hash);
    w.str(&model.config_hash);
    w.strs(&model.channel_names);
    w.usize(model.length);
    match &model.transform {
        FittedTransform::Rocket(bank) => {
            w.u8(TAG_ROCKET);
            w.str(RNG_ALGORITHM);
            w.u64(bank.seed);
            w.usize(bank.len());
            w.usize(bank.n_channels);
            w.usize(bank.input_length);
            w.bytes(&bank.checksum());
        }
        FittedTransform::MiniRocket(p) => {
            w.u8(TAG_MINIROCKET);
            w.usize(p.n_channels);
            w.usize(p.input_length);
            w.u8(u8::from(p.normalize));
            w.u64(p.seed);
            w.usizes(&p.dilations);
            w.usizes(&p.features_per_dilation);
            w.usize(p.channel_combinations.len());
            p.channel_combinations.iter().for_each(|c| w.usizes(c));
            w.usizes(&p.bias_sources);
            w.f64s(&p.biases);
        }
    }
    w.f64s(&model.scaler.mean);
    w.f64s(&model.scaler.scale);
    let ridge = &model.ridge;
    w.usize(ridge.classes.len());
    ridge.classes.iter().for_each(|c| w.u8(c.index() as u8));
    w.usize(ridge.n_features());
    w.f64s(&ridge.weights);
    w.f64s(&ridge.intercepts);
    w.f64(ridge.alpha);
    w.f64s(&ridge.alpha_grid);
    w.f64s(&ridge.loo_errors);
    w.finish()
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn decode_model(bytes: &[u8]) -> Result<TrainedModel> {
    let mut r = Reader::open(bytes, MODEL_MAGIC, MODEL_VERSION, "model")?;
    let config: PipelineConfig =
        serde_json::from_str(&r.str()?).map_err(|e| format_err(format!("embedded config: {e}")))?;
    let prep_hash = r.str()?;
    let config_hash = r.str()?;
    if prep_hash != config.prep_hash() || config_hash != config.hash() {
        return Err(format_err("stored config hashes do not match the embedded config"));
    }
    let channel_names = r.strs()?;
    let length = r.usize()?;
    let transform = match r.u8()? {
        TAG_ROCKET => {
            let algorithm = r.str()?;
            if algorithm != RNG_ALGORITHM {
                return Err(format_err(format!(
                    "kernel bank was drawn with {algorithm}, this build regenerates with {RNG_ALGORITHM}"
                )));
            }
            let seed = r.u64()?;
            let (k, c, t) = (r.usize()?, r.usize()?, r.usize()?);
            let stored = r.bytes(32)?;
            let bank = generate_kernels(k, c, t, seed).map_err(|e| format_err(e.to_string()))?;
            if bank.checksum().as_slice() != stored {
                return Err(format_err("regenerated kernel bank does not match the stored checksum"));
            }
            FittedTransform::Rocket(bank)
        }
        TAG_MINIROCKET => {
            let n_channels = r.usize()?;
            let input_length = r.usize()?;
            let normalize = r.u8()? != 0;
            let seed = r.u64()?;
            let dilations = r.usizes()?;
            let features_per_dilation = r.usizes()?;
            let n_combos = r.usize()?;
            let channel_combinations =
                (0..n_combos.min(bytes.len())).map(|_| r.usizes()).collect::<Result<Vec<_>>>()?;
            let bias_sources = r.usizes()?;
            let biases = r.f64s()?;
            FittedTransform::MiniRocket(MiniRocketParams {
                n_channels,
                input_length,
                normalize,
                seed,
                dilations,
                features_per_dilation,
                channel_combinations,
                bias_sources,
                biases,
            })
        }
        tag => return Err(format_err(format!("unknown transform tag {tag}"))),
    };
    let scaler = FeatureScaler { mean: r.f64s()?, scale: r.f64s()? };
    let n_classes = r.usize()?;
    let classes = (0..n_classes.min(4))
        .map(|_| ClassLabel::from_index(r.u8()? as usize).ok_or_else(|| format_err("bad class index")))
        .collect::<Result<Vec<_>>>()?;
    if classes.len() != n_classes {
        return Err(format_err("too many classes"));
    }
    let n_features = r.usize()?;
    let ridge = RidgeModel {
        classes,
        weights: r.f64s()?,
        intercepts: r.f64s()?,
        alpha: r.f64()?,
        alpha_grid: r.f64s()?,
        loo_errors: r.f64s()?,
    };
    r.finish()?;
    if ridge.weights.len() != n_features * n_classes
        || ridge.intercepts.len() != n_classes
        || scaler.mean.len() != n_features
        || scaler.scale.len() != n_features
    {
        return Err(format_err("inconsistent weight, intercept or scaler sizes"));
    }
    Ok(TrainedModel { config, prep_hash, config_hash, channel_names, length, transform, scaler, ridge })
}

pub fn save_model(path: &Path, model: &TrainedModel) -> Result<()> {
    super::write_atomic(path, &encode_model(model))
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        e => e,
    })
}
