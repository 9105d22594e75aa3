use serde::{Deserialize, Serialize};

use super::peaks::{detect_peaks, PeakParams};
use super::savgol::smooth_savgol;
use super::PrepError;
use crate::pose::{Axis, BodyPart, ChannelSpec};
use crate::MultivariateSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentationParams {
    /// Body parts whose Y channels are smoothed and averaged into the anchor.
    pub anchor_parts: Vec<usize>,
    /// Negate the anchor before peak picking. Image Y grows downwards, so
    /// with this set the overhead lockout of each repetition is the maximum.
    pub invert: bool,
    pub window: usize,
    pub polyorder: usize,
    /// `None` estimates the distance from the anchor's autocorrelation.
    pub min_peak_distance: Option<usize>,
    /// Fraction of the anchor's range.
    pub min_prominence: f64,
    pub expected_reps: Option<usize>,
    /// Segments shorter than this fraction of the median segment are dropped.
    pub min_segment_fraction: f64,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            anchor_parts: vec![BodyPart::R_WRIST, BodyPart::L_WRIST, BodyPart::R_ELBOW, BodyPart::L_ELBOW],
            invert: true,
            window: 11,
            polyorder: 3,
            min_peak_distance: None,
            min_prominence: 0.1,
            expected_reps: None,
            min_segment_fraction: 0.25,
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<(), PrepError> {
        if self.window.is_multiple_of(2) || self.window <= self.polyorder {
            return Err(PrepError::InvalidParams(format!(
                "smoothing window {} must be odd and greater than polyorder {}",
                self.window, self.polyorder
            )));
        }
        if !(self.min_prominence > 0.0 && self.min_prominence < 1.0) {
            return Err(PrepError::InvalidParams(format!("min_prominence {} outside (0, 1)", self.min_prominence)));
        }
        if self.anchor_parts.is_empty() {
            return Err(PrepError::InvalidParams("no anchor parts".into()));
        }
        if !(0.0..1.0).contains(&self.min_segment_fraction) {
            return Err(PrepError::InvalidParams("min_segment_fraction outside [0, 1)".into()));
        }
        Ok(())
    }

    pub fn anchor_channel_names(&self) -> Vec<String> {
        self.anchor_parts.iter().map(|&p| ChannelSpec::channel_name(p, Axis::Y)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segmentation {
    /// Kept repetitions as half-open `[start, end)` ranges, ordered.
    pub segments: Vec<(usize, usize)>,
    pub dropped: Vec<(usize, usize)>,
    pub peaks: Vec<usize>,
    pub min_peak_distance: usize,
    /// `(expected, found)` when `expected_reps` is set and disagrees.
    pub rep_count_mismatch: Option<(usize, usize)>,
}

/// Smoothed, averaged (and optionally negated) anchor signal.
pub fn anchor_signal(series: &MultivariateSeries, params: &SegmentationParams) -> Result<Vec<f64>, PrepError> {
    params.validate()?;
    let mut acc = vec![0.0; series.len()];
    let names = params.anchor_channel_names();
    for name in &names {
        let channel = series.channel_by_name(name).ok_or_else(|| PrepError::MissingAnchor(name.clone()))?;
        let smooth = smooth_savgol(channel, params.window, params.polyorder)?;
        for (a, v) in acc.iter_mut().zip(smooth) {
            *a += v;
        }
    }
    let sign = if params.invert { -1.0 } else { 1.0 };
    let k = names.len() as f64;
    Ok(acc.into_iter().map(|v| sign * v / k).collect())
}

/// Dominant period in samples from the first autocorrelation maximum after
/// the first negative lag.
fn estimate_period(x: &[f64]) -> Option<usize> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let ac = |lag: usize| c[..n - lag].iter().zip(&c[lag..]).map(|(a, b)| a * b).sum::<f64>();
    let zero = ac(0);
    if zero <= 0.0 {
        return None;
    }
    let max_lag = n / 2;
    let first_negative = (1..max_lag).find(|&lag| ac(lag) < 0.0)?;
    let (lag, value) = (first_negative..max_lag).map(|lag| (lag, ac(lag))).fold((0, f64::NEG_INFINITY), |best, cur| {
        if cur.1 > best.1 {
            cur
        } else {
            best
        }
    });
    (value > 0.0).then_some(lag)
}

fn median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

/// Splits a clip into single repetitions.
///
/// Peaks of the anchor signal mark one repetition each; cut points are the
/// anchor minima between consecutive peaks, with the series start and end as
/// outer boundaries. Without an explicit `min_peak_distance` the distance is
/// half the autocorrelation period, then refined to half the median
/// inter-peak gap until it stops changing.
pub fn segment_repetitions(
    series: &MultivariateSeries,
    params: &SegmentationParams,
) -> Result<Segmentation, PrepError> {
    let anchor = anchor_signal(series, params)?;
    let (lo, hi) = anchor.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo <= 1e-9 * lo.abs().max(hi.abs()).max(1.0) {
        return Err(PrepError::NoRepetitionsFound);
    }
    let mut distance = match params.min_peak_distance {
        Some(d) => d.max(1),
        None => estimate_period(&anchor).map_or(1, |p| ((p as f64 * 0.5).round() as usize).max(1)),
    };
    let detect =
        |d: usize| detect_peaks(&anchor, &PeakParams { min_distance: d, min_prominence: params.min_prominence });
    let mut peaks = detect(distance);
    if params.min_peak_distance.is_none() {
        for _ in 0..5 {
            if peaks.len() < 2 {
                break;
            }
            let mut gaps: Vec<usize> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
            let refined = ((median(&mut gaps) * 0.5).round() as usize).max(1);
            if refined == distance {
                break;
            }
            distance = refined;
            peaks = detect(distance);
        }
    }
    if peaks.is_empty() {
        return Err(PrepError::NoRepetitionsFound);
    }

    let mut bounds = Vec::with_capacity(peaks.len() + 1);
    bounds.push(0);
    for w in peaks.windows(2) {
        let (p, q) = (w[0], w[1]);
        let cut = (p + 1..q).fold(p + 1, |best, i| if anchor[i] < anchor[best] { i } else { best });
        bounds.push(cut);
    }
    bounds.push(anchor.len());
    let all: Vec<(usize, usize)> = bounds.windows(2).map(|w| (w[0], w[1])).collect();

    let mut lengths: Vec<usize> = all.iter().map(|(s, e)| e - s).collect();
    let min_len = params.min_segment_fraction * median(&mut lengths);
    let (segments, dropped): (Vec<_>, Vec<_>) = all.into_iter().partition(|(s, e)| (e - s) as f64 >= min_len);
    let rep_count_mismatch = params.expected_reps.filter(|&n| n != segments.len()).map(|n| (n, segments.len()));
    Ok(Segmentation { segments, dropped, peaks, min_peak_distance: distance, rep_count_mismatch })
}

/// `n_reps` contiguous windows of `len / n_reps` samples; the last one also
/// takes the remainder.
pub fn segment_equal(len: usize, n_reps: usize) -> Result<Vec<(usize, usize)>, PrepError> {
    if n_reps == 0 || n_reps > len {
        return Err(PrepError::InvalidParams(format!("cannot split {len} samples into {n_reps} repetitions")));
    }
    let width = len / n_reps;
    Ok((0..n_reps).map(|k| (k * width, if k + 1 == n_reps { len } else { (k + 1) * width })).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Wrist/elbow Y traces in image coordinates: `reps` raised-cosine lifts.
    fn press_series(reps: usize, period: usize, noise: impl Fn(usize) -> f64) -> MultivariateSeries {
        let n = reps * period;
        let params = SegmentationParams::default();
        let channels = params
            .anchor_parts
            .iter()
            .enumerate()
            .map(|(k, _)| {
                (0..n)
                    .map(|i| {
                        let h = 0.5 * (1.0 - (2.0 * PI * i as f64 / period as f64).cos());
                        300.0 + 10.0 * k as f64 - 150.0 * h + noise(i * 7 + k)
                    })
                    .collect()
            })
            .collect();
        MultivariateSeries::new(params.anchor_channel_names(), channels).unwrap()
    }

    #[test]
    fn ten_reps_give_ten_segments_with_one_peak_each() {
        let series = press_series(10, 90, |_| 0.0);
        let seg = segment_repetitions(&series, &SegmentationParams::default()).unwrap();
        assert_eq!(seg.segments.len(), 10);
        assert!(seg.dropped.is_empty());
        for &(s, e) in &seg.segments {
            assert_eq!(seg.peaks.iter().filter(|&&p| p >= s && p < e).count(), 1);
        }
        assert_eq!(seg.segments.first().unwrap().0, 0);
        assert_eq!(seg.segments.last().unwrap().1, 900);
    }

    #[test]
    fn noisy_reps_still_segment() {
        // deterministic pseudo-noise, +-4 px
        let series = press_series(10, 75, |i| ((i as f64 * 12.9898).sin() * 43758.5453).fract() * 4.0);
        let seg = segment_repetitions(&series, &SegmentationParams::default()).unwrap();
        assert_eq!(seg.segments.len(), 10);
    }

    #[test]
    fn single_period_is_one_segment() {
        let series = press_series(1, 120, |_| 0.0);
        let seg = segment_repetitions(&series, &SegmentationParams::default()).unwrap();
        assert_eq!(seg.segments, vec![(0, 120)]);
    }

    #[test]
    fn flat_series_has_no_repetitions() {
        let params = SegmentationParams::default();
        let series = MultivariateSeries::new(params.anchor_channel_names(), vec![vec![250.0; 200]; 4]).unwrap();
        assert_eq!(segment_repetitions(&series, &params), Err(PrepError::NoRepetitionsFound));
    }

    #[test]
    fn missing_anchor_reported() {
        let series = MultivariateSeries::unnamed(vec![vec![0.0; 50]]).unwrap();
        assert!(matches!(
            segment_repetitions(&series, &SegmentationParams::default()),
            Err(PrepError::MissingAnchor(_))
        ));
    }

    #[test]
    fn expected_count_mismatch_is_flagged() {
        let series = press_series(8, 90, |_| 0.0);
        let params = SegmentationParams { expected_reps: Some(10), ..SegmentationParams::default() };
        let seg = segment_repetitions(&series, &params).unwrap();
        assert_eq!(seg.segments.len(), 8);
        assert_eq!(seg.rep_count_mismatch, Some((10, 8)));
    }

    #[test]
    fn short_segments_dropped() {
        // A small blip right at the end makes a tiny trailing segment.
        let params = SegmentationParams { min_peak_distance: Some(5), ..SegmentationParams::default() };
        let mut series = press_series(4, 100, |_| 0.0).into_parts();
        for (k, ch) in series.1.iter_mut().enumerate() {
            ch.extend((0..12).map(|i| 300.0 + 10.0 * k as f64 - 60.0 * (PI * i as f64 / 11.0).sin()));
        }
        let series = MultivariateSeries::new(series.0, series.1).unwrap();
        let seg = segment_repetitions(&series, &params).unwrap();
        assert_eq!(seg.segments.len(), 4);
        assert_eq!(seg.dropped.len(), 1);
    }

    #[test]
    fn equal_split() {
        let s = segment_equal(100, 10).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s[0], (0, 10));
        assert_eq!(s[9], (90, 100));
        assert_eq!(segment_equal(101, 10).unwrap()[9], (90, 101));
        assert_eq!(segment_equal(37, 1).unwrap(), vec![(0, 37)]);
        assert!(segment_equal(10, 0).is_err());
    }

    #[test]
    fn invalid_params() {
        let series = press_series(2, 50, |_| 0.0);
        let params = SegmentationParams { window: 10, ..SegmentationParams::default() };
        assert!(matches!(segment_repetitions(&series, &params), Err(PrepError::InvalidParams(_))));
        let params = SegmentationParams { min_prominence: 1.5, ..SegmentationParams::default() };
        assert!(matches!(segment_repetitions(&series, &params), Err(PrepError::InvalidParams(_))));
    }
}
