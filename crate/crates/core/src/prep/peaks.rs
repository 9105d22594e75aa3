use serde::{Deserialize, Serialize};

/// Peak filters. `min_prominence` is a fraction of the signal's range
/// (`max - min`), so the detected set does not change under `a * x + b`
/// with `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakParams {
    /// Minimum index separation between kept peaks.
    pub min_distance: usize,
    pub min_prominence: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self { min_distance: 1, min_prominence: 0.1 }
    }
}

/// Indices of local maxima. A flat top counts once, at its middle sample
/// (rounded down); the first and last samples are never maxima.
pub fn local_maxima(x: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    if x.len() < 3 {
        return peaks;
    }
    let last = x.len() - 1;
    let mut i = 1;
    while i < last {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < last && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                peaks.push((i + ahead - 1) / 2);
                i = ahead;
            }
        }
        i += 1;
    }
    peaks
}

/// Topographic prominence of each peak: its height above the higher of the
/// two lowest points reached before climbing above the peak on either side.
pub fn peak_prominences(x: &[f64], peaks: &[usize]) -> Vec<f64> {
    peaks
        .iter()
        .map(|&p| {
            let h = x[p];
            let mut left_min = h;
            for &v in x[..=p].iter().rev() {
                if v > h {
                    break;
                }
                left_min = left_min.min(v);
            }
            let mut right_min = h;
            for &v in &x[p..] {
                if v > h {
                    break;
                }
                right_min = right_min.min(v);
            }
            h - left_min.max(right_min)
        })
        .collect()
}

/// Local maxima whose prominence reaches `min_prominence * range`, thinned
/// so that no two kept peaks are closer than `min_distance`. Thinning visits
/// peaks from highest to lowest (earlier index first on ties) and drops any
/// peak within reach of one already kept. Result is sorted ascending.
pub fn detect_peaks(x: &[f64], params: &PeakParams) -> Vec<usize> {
    if x.len() < 3 {
        return Vec::new();
    }
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let threshold = params.min_prominence * (hi - lo);
    let maxima = local_maxima(x);
    let prominences = peak_prominences(x, &maxima);
    let peaks: Vec<usize> =
        maxima.into_iter().zip(prominences).filter(|&(_, prom)| prom >= threshold).map(|(p, _)| p).collect();
    select_by_distance(x, &peaks, params.min_distance.max(1))
}

fn select_by_distance(x: &[f64], peaks: &[usize], distance: usize) -> Vec<usize> {
    if distance <= 1 {
        return peaks.to_vec();
    }
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    order.sort_by(|&a, &b| x[peaks[b]].total_cmp(&x[peaks[a]]).then(a.cmp(&b)));
    let mut keep = vec![true; peaks.len()];
    for &j in &order {
        if !keep[j] {
            continue;
        }
        let mut k = j;
        while k > 0 && peaks[j] - peaks[k - 1] < distance {
            k -= 1;
            keep[k] = false;
        }
        let mut k = j + 1;
        while k < peaks.len() && peaks[k] - peaks[j] < distance {
            keep[k] = false;
            k += 1;
        }
    }
    peaks.iter().zip(keep).filter(|(_, k)| *k).map(|(&p, _)| p).collect()
}
