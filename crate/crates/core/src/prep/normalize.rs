use crate::MultivariateSeries;

/// Subtracts the mean and divides by the population standard deviation.
/// A channel with (numerically) zero spread becomes all zeros.
pub fn znormalize_channel(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    if values.is_empty() {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd <= 1e-12 * mean.abs().max(1.0) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

pub fn znormalize(series: &MultivariateSeries) -> MultivariateSeries {
    series.map_channels(znormalize_channel)
}
