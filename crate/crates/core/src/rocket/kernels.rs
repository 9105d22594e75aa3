use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{check_shape, FeatureMatrix, RocketError};
use crate::MultivariateSeries;

/// Name of the generator behind [`generate_kernels`]; persisted with models.
pub const RNG_ALGORITHM: &str = "chacha8/rand-0.9";

const LENGTHS: [usize; 3] = [7, 9, 11];

/// One random kernel over a subset of channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RocketKernel {
    pub length: usize,
    /// Input channels, ascending.
    pub channels: Vec<usize>,
    /// `channels.len() x length`, channel-major. Each channel's weights sum to zero.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub dilation: usize,
    pub padding: bool,
}

impl RocketKernel {
    pub fn span(&self) -> usize {
        (self.length - 1) * self.dilation
    }

    pub fn channel_weights(&self, k: usize) -> &[f64] {
        &self.weights[k * self.length..(k + 1) * self.length]
    }

    /// Convolution output minus bias at every valid position, written to `out`.
    pub fn convolve_into(&self, x: &MultivariateSeries, out: &mut Vec<f64>) {
        let t = x.len();
        let span = self.span();
        let pad = if self.padding { span / 2 } else { 0 };
        let out_len = t + 2 * pad - span;
        out.clear();
        out.resize(out_len, -self.bias);
        for (k, &c) in self.channels.iter().enumerate() {
            let xs = x.channel(c);
            for (j, &w) in self.channel_weights(k).iter().enumerate() {
                let offset = j * self.dilation;
                let lo = pad.saturating_sub(offset);
                let hi = out_len.min(t + pad - offset);
                if lo >= hi {
                    continue;
                }
                let start = lo + offset - pad;
                for (o, v) in out[lo..hi].iter_mut().zip(&xs[start..start + (hi - lo)]) {
                    *o += w * v;
                }
            }
        }
    }
}

/// Max and proportion of strictly positive values of a convolution output.
pub fn max_and_ppv(z: &[f64]) -> (f64, f64) {
    let (max, positive) = z.iter().fold((f64::NEG_INFINITY, 0usize), |(m, p), &v| (m.max(v), p + usize::from(v > 0.0)));
    (max, positive as f64 / z.len() as f64)
}

/// `(max, ppv)` of one kernel on one sample.
pub fn apply_kernel(sample: &MultivariateSeries, kernel: &RocketKernel) -> (f64, f64) {
    let mut buf = Vec::with_capacity(sample.len());
    kernel.convolve_into(sample, &mut buf);
    max_and_ppv(&buf)
}

/// Kernels plus the parameters they were generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBank {
    pub kernels: Vec<RocketKernel>,
    pub seed: u64,
    pub n_channels: usize,
    pub input_length: usize,
}

impl KernelBank {
    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        2 * self.kernels.len()
    }

    /// SHA-256 over a canonical little-endian encoding of every kernel.
    pub fn checksum(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for v in [self.seed, self.kernels.len() as u64, self.n_channels as u64, self.input_length as u64] {
            h.update(v.to_le_bytes());
        }
        for k in &self.kernels {
            h.update((k.length as u64).to_le_bytes());
            h.update((k.dilation as u64).to_le_bytes());
            h.update([u8::from(k.padding)]);
            h.update(k.bias.to_bits().to_le_bytes());
            h.update((k.channels.len() as u64).to_le_bytes());
            for &c in &k.channels {
                h.update((c as u64).to_le_bytes());
            }
            for w in &k.weights {
                h.update(w.to_bits().to_le_bytes());
            }
        }
        h.finalize().into()
    }
}

/// Draws `n_kernels` kernels for `n_channels x input_length` inputs.
///
/// Per kernel, in draw order: length uniform over {7, 9, 11}; channel count
/// uniform over `1..=n_channels` and that many distinct channels; standard
/// normal weights, mean-centred per channel; bias uniform on `[-1, 1]`;
/// dilation `floor(2^u)` with `u` uniform on `[0, log2((T - 1) / (length - 1))]`;
/// padding on a fair coin. The stream is ChaCha8 seeded with `seed`.
pub fn generate_kernels(
    n_kernels: usize,
    n_channels: usize,
    input_length: usize,
    seed: u64,
) -> Result<KernelBank, RocketError> {
    if n_kernels == 0 || n_channels == 0 || input_length < 12 {
        return Err(RocketError::InvalidParams(format!(
            "need at least one kernel, one channel and length >= 12 (got {n_kernels}, {n_channels}, {input_length})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernels = (0..n_kernels)
        .map(|_| {
            let length = LENGTHS[rng.random_range(0..LENGTHS.len())];
            let used = rng.random_range(1..=n_channels);
            let mut channels = index::sample(&mut rng, n_channels, used).into_vec();
            channels.sort_unstable();
            let mut weights = Vec::with_capacity(used * length);
            for _ in 0..used {
                let w: Vec<f64> = (0..length).map(|_| rng.sample(StandardNormal)).collect();
                let mean = w.iter().sum::<f64>() / length as f64;
                weights.extend(w.into_iter().map(|v| v - mean));
            }
            let bias = rng.random_range(-1.0..=1.0);
            let limit = (input_length - 1) / (length - 1);
            let exponent = rng.random_range(0.0..=((input_length - 1) as f64 / (length - 1) as f64).log2());
            let dilation = (2f64.powf(exponent) as usize).clamp(1, limit);
            let padding = rng.random_bool(0.5);
            RocketKernel { length, channels, weights, bias, dilation, padding }
        })
        .collect();
    Ok(KernelBank { kernels, seed, n_channels, input_length })
}

/// Row `i` holds `(max, ppv)` of every kernel, in kernel order, on sample `i`.
pub fn rocket_transform<S>(samples: &[S], bank: &KernelBank) -> Result<FeatureMatrix, RocketError>
where
    S: AsRef<MultivariateSeries> + Sync,
{
    check_shape(samples, bank.n_channels, bank.input_length)?;
    let cols = bank.n_features();
    let mut data = vec![0.0; samples.len() * cols];
    data.par_chunks_mut(cols.max(1)).zip(samples.par_iter()).for_each(|(row, sample)| {
        let sample = sample.as_ref();
        let mut buf = Vec::with_capacity(sample.len());
        for (k, kernel) in bank.kernels.iter().enumerate() {
            kernel.convolve_into(sample, &mut buf);
            let (max, ppv) = max_and_ppv(&buf);
            row[2 * k] = max;
            row[2 * k + 1] = ppv;
        }
    });
    Ok(FeatureMatrix::from_vec(samples.len(), cols, data))
}
