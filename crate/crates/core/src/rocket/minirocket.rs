use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_shape, FeatureMatrix, RocketError};
use crate::prep::znormalize_channel;
use crate::MultivariateSeries;

pub const MINIROCKET_KERNELS: usize = 84;
const KERNEL_LENGTH: usize = 9;

/// The 84 length-9 kernels: weight 2 at three positions, -1 elsewhere.
/// Entry `k` lists the positions holding 2, in lexicographic order.
fn kernel_positions() -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(MINIROCKET_KERNELS);
    for a in 0..KERNEL_LENGTH {
        for b in a + 1..KERNEL_LENGTH {
            for c in b + 1..KERNEL_LENGTH {
                out.push([a, b, c]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MiniRocketConfig {
    /// Requested feature count; rounded down to a multiple of 84.
    pub num_features: usize,
    pub max_dilations_per_kernel: usize,
    /// Z-normalise every channel of every sample before convolution, which
    /// makes the features invariant to the signal's offset and scale.
    pub normalize: bool,
}

impl Default for MiniRocketConfig {
    fn default() -> Self {
        Self { num_features: 10_000, max_dilations_per_kernel: 32, normalize: true }
    }
}

/// Fitted MiniROCKET state. Features are enumerated dilation-major, then
/// kernel, then bias.
#[derive(Debug, Clone, PartialEq)]
pub struct MiniRocketParams {
    pub n_channels: usize,
    pub input_length: usize,
    pub normalize: bool,
    pub seed: u64,
    pub dilations: Vec<usize>,
    pub features_per_dilation: Vec<usize>,
    /// Channel subset per `(dilation, kernel)` pair.
    pub channel_combinations: Vec<Vec<usize>>,
    /// Training sample whose convolution output supplied each pair's biases.
    pub bias_sources: Vec<usize>,
    pub biases: Vec<f64>,
}

impl MiniRocketParams {
    pub fn n_features(&self) -> usize {
        self.biases.len()
    }
}

/// `frac(i * golden ratio)` for `i = 1..=n`: a low-discrepancy sequence on `[0, 1)`.
pub fn golden_quantiles(n: usize) -> Vec<f64> {
    let phi = (5f64.sqrt() + 1.0) / 2.0;
    (1..=n).map(|i| (i as f64 * phi).rem_euclid(1.0)).collect()
}

fn fit_dilations(input_length: usize, config: &MiniRocketConfig) -> (Vec<usize>, Vec<usize>) {
    let per_kernel = config.num_features / MINIROCKET_KERNELS;
    let true_max = per_kernel.min(config.max_dilations_per_kernel);
    let multiplier = per_kernel as f64 / true_max as f64;
    let max_exponent = ((input_length - 1) as f64 / (KERNEL_LENGTH - 1) as f64).log2();
    let mut dilations: Vec<usize> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for i in 0..true_max {
        let e = if true_max == 1 { 0.0 } else { max_exponent * i as f64 / (true_max - 1) as f64 };
        let d = 2f64.powf(e) as usize;
        match dilations.last() {
            Some(&last) if last == d => *counts.last_mut().unwrap() += 1,
            _ => {
                dilations.push(d);
                counts.push(1);
            }
        }
    }
    let mut per_dilation: Vec<usize> = counts.iter().map(|&c| (c as f64 * multiplier) as usize).collect();
    let mut remainder = per_kernel - per_dilation.iter().sum::<usize>();
    let mut i = 0;
    while remainder > 0 {
        per_dilation[i] += 1;
        remainder -= 1;
        i = (i + 1) % per_dilation.len();
    }
    (dilations, per_dilation)
}

fn prepare(sample: &MultivariateSeries, normalize: bool) -> Vec<Vec<f64>> {
    sample.channels().iter().map(|c| if normalize { znormalize_channel(c) } else { c.clone() }).collect()
}

/// Shifted copies of every channel for one dilation: `taps[c][j][t] = x_c[t + (j - 4) d]`,
/// zero outside the series, plus `base[c] = -sum_j taps[c][j]`.
struct DilationTaps {
    taps: Vec<Vec<Vec<f64>>>,
    base: Vec<Vec<f64>>,
}

impl DilationTaps {
    fn new(channels: &[Vec<f64>], dilation: usize) -> Self {
        let t = channels[0].len();
        let half = (KERNEL_LENGTH / 2) as isize;
        let taps: Vec<Vec<Vec<f64>>> = channels
            .iter()
            .map(|x| {
                (0..KERNEL_LENGTH)
                    .map(|j| {
                        let shift = (j as isize - half) * dilation as isize;
                        (0..t as isize)
                            .map(|i| {
                                let src = i + shift;
                                if src >= 0 && (src as usize) < t {
                                    x[src as usize]
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let base = taps
            .iter()
            .map(|ch: &Vec<Vec<f64>>| (0..t).map(|i| -ch.iter().map(|tap| tap[i]).sum::<f64>()).collect())
            .collect();
        Self { taps, base }
    }

    fn output(&self, positions: &[usize; 3], combination: &[usize], out: &mut Vec<f64>) {
        let t = self.base[0].len();
        out.clear();
        out.resize(t, 0.0);
        for &c in combination {
            let [a, b, d] = positions.map(|p| &self.taps[c][p]);
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.base[c][i] + 3.0 * (a[i] + b[i] + d[i]);
            }
        }
    }
}

/// Fits dilations, channel combinations and biases on `train`.
pub fn minirocket_fit<S>(train: &[S], config: &MiniRocketConfig, seed: u64) -> Result<MiniRocketParams, RocketError>
where
    S: AsRef<MultivariateSeries>,
{
    let first = train.first().ok_or(RocketError::EmptyDataset)?.as_ref();
    let (n_channels, input_length) = (first.n_channels(), first.len());
    check_shape(train, n_channels, input_length)?;
    if input_length < KERNEL_LENGTH {
        return Err(RocketError::InvalidParams(format!("input length {input_length} < {KERNEL_LENGTH}")));
    }
    if config.num_features < MINIROCKET_KERNELS || config.max_dilations_per_kernel == 0 {
        return Err(RocketError::InvalidParams(format!(
            "need at least {MINIROCKET_KERNELS} features and one dilation per kernel"
        )));
    }

    let (dilations, features_per_dilation) = fit_dilations(input_length, config);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n_pairs = dilations.len() * MINIROCKET_KERNELS;
    let max_per_combination = n_channels.min(KERNEL_LENGTH);
    let top = ((max_per_combination + 1) as f64).log2();
    let channel_combinations: Vec<Vec<usize>> = (0..n_pairs)
        .map(|_| {
            let size = (2f64.powf(rng.random_range(0.0..top)) as usize).clamp(1, max_per_combination);
            let mut chosen = index::sample(&mut rng, n_channels, size).into_vec();
            chosen.sort_unstable();
            chosen
        })
        .collect();

    let positions = kernel_positions();
    let total: usize = features_per_dilation.iter().sum::<usize>() * MINIROCKET_KERNELS;
    let quantiles = golden_quantiles(total);
    let mut biases = Vec::with_capacity(total);
    let mut bias_sources = Vec::with_capacity(n_pairs);
    let mut out = Vec::new();
    for (d_idx, (&dilation, &n_feat)) in dilations.iter().zip(&features_per_dilation).enumerate() {
        for (k, pos) in positions.iter().enumerate() {
            let source = rng.random_range(0..train.len());
            bias_sources.push(source);
            let channels = prepare(train[source].as_ref(), config.normalize);
            let taps = DilationTaps::new(&channels, dilation);
            taps.output(pos, &channel_combinations[d_idx * MINIROCKET_KERNELS + k], &mut out);
            out.sort_by(f64::total_cmp);
            let last = (out.len() - 1) as f64;
            for _ in 0..n_feat {
                let q = quantiles[biases.len()];
                biases.push(out[(q * last).floor() as usize]);
            }
        }
    }

    Ok(MiniRocketParams {
        n_channels,
        input_length,
        normalize: config.normalize,
        seed,
        dilations,
        features_per_dilation,
        channel_combinations,
        bias_sources,
        biases,
    })
}

fn transform_one(sample: &MultivariateSeries, params: &MiniRocketParams, positions: &[[usize; 3]], row: &mut [f64]) {
    let channels = prepare(sample, params.normalize);
    let t = params.input_length;
    let mut out = Vec::with_capacity(t);
    let mut f = 0;
    for (d_idx, (&dilation, &n_feat)) in params.dilations.iter().zip(&params.features_per_dilation).enumerate() {
        let taps = DilationTaps::new(&channels, dilation);
        let pad = (KERNEL_LENGTH - 1) * dilation / 2;
        for (k, pos) in positions.iter().enumerate() {
            taps.output(pos, &params.channel_combinations[d_idx * MINIROCKET_KERNELS + k], &mut out);
            // alternate pairs count only positions that see no padding
            let window = if (d_idx + k) % 2 == 1 && t > 2 * pad { &out[pad..t - pad] } else { &out[..] };
            let n = window.len() as f64;
            for &bias in &params.biases[f..f + n_feat] {
                row[f] = window.iter().filter(|&&v| v > bias).count() as f64 / n;
                f += 1;
            }
        }
    }
}

/// PPV of every `(dilation, kernel, bias)` feature on every sample.
pub fn minirocket_transform<S>(samples: &[S], params: &MiniRocketParams) -> Result<FeatureMatrix, RocketError>
where
    S: AsRef<MultivariateSeries> + Sync,
{
    check_shape(samples, params.n_channels, params.input_length)?;
    let cols = params.n_features();
    let positions = kernel_positions();
    let mut data = vec![0.0; samples.len() * cols];
    data.par_chunks_mut(cols.max(1))
        .zip(samples.par_iter())
        .for_each(|(row, s)| transform_one(s.as_ref(), params, &positions, row));
    Ok(FeatureMatrix::from_vec(samples.len(), cols, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighty_four_kernels_with_three_twos() {
        let k = kernel_positions();
        assert_eq!(k.len(), 84);
        assert_eq!(k[0], [0, 1, 2]);
        assert_eq!(k[83], [6, 7, 8]);
    }

    #[test]
    fn dilation_ladder_for_length_161() {
        let (d, n) = fit_dilations(161, &MiniRocketConfig::default());
        assert_eq!(d[0], 1);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert!(*d.last().unwrap() <= 20);
        assert_eq!(n.iter().sum::<usize>(), 10_000 / 84);
    }

    #[test]
    fn taps_match_direct_weighted_sum() {
        let x: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let taps = DilationTaps::new(std::slice::from_ref(&x), 2);
        let mut out = Vec::new();
        let pos = [1, 4, 8];
        taps.output(&pos, &[0], &mut out);
        for t in 0..30isize {
            let mut expected = 0.0;
            for j in 0..9isize {
                let w = if pos.contains(&(j as usize)) { 2.0 } else { -1.0 };
                let src = t + (j - 4) * 2;
                if (0..30).contains(&src) {
                    expected += w * x[src as usize];
                }
            }
            assert!((out[t as usize] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn quantiles_in_unit_interval() {
        let q = golden_quantiles(1000);
        assert!(q.iter().all(|v| (0.0..1.0).contains(v)));
        assert!((q[0] - 0.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn empty_training_set() {
        let empty: Vec<MultivariateSeries> = Vec::new();
        assert_eq!(minirocket_fit(&empty, &MiniRocketConfig::default(), 0), Err(RocketError::EmptyDataset));
    }
}
