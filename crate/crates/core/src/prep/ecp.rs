use serde::Serialize;

use super::{Dataset, PrepError};
use crate::ClassLabel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRanking {
    /// Per-channel score, indexed like the dataset's channels.
    pub scores: Vec<f64>,
    /// Channel indices by descending score (lower index first on ties).
    pub order: Vec<usize>,
    /// Leading part of `order` that is kept.
    pub selected: Vec<usize>,
}

/// Ranks channels by how far apart the class centroids are.
///
/// For each channel the class-mean series is computed per class and the
/// channel's score is the sum of Euclidean distances over all class pairs.
/// Unless `keep` is given, the cut is placed at the elbow of the sorted
/// score curve: the position with the largest second difference.
pub fn select_channels_ecp(train: &Dataset, keep: Option<usize>) -> Result<ChannelRanking, PrepError> {
    if train.is_empty() {
        return Err(PrepError::EmptyDataset);
    }
    let classes: Vec<ClassLabel> = train.classes().into_iter().collect();
    if classes.len() < 2 {
        return Err(PrepError::DegenerateDataset);
    }
    let (n_channels, len) = (train.n_channels(), train.length);
    let mut counts = vec![0usize; classes.len()];
    // centroids[class][channel][t]
    let mut centroids = vec![vec![vec![0.0; len]; n_channels]; classes.len()];
    for sample in train.samples() {
        let k = classes.binary_search(&sample.label).expect("label is one of the classes");
        counts[k] += 1;
        for (acc, values) in centroids[k].iter_mut().zip(sample.series.channels()) {
            for (a, v) in acc.iter_mut().zip(values) {
                *a += v;
            }
        }
    }
    for (class, &n) in centroids.iter_mut().zip(&counts) {
        for channel in class.iter_mut() {
            channel.iter_mut().for_each(|v| *v /= n as f64);
        }
    }

    let scores: Vec<f64> = (0..n_channels)
        .map(|c| {
            let mut total = 0.0;
            for a in 0..classes.len() {
                for b in a + 1..classes.len() {
                    let d2: f64 = centroids[a][c].iter().zip(&centroids[b][c]).map(|(x, y)| (x - y) * (x - y)).sum();
                    total += d2.sqrt();
                }
            }
            total
        })
        .collect();

    let mut order: Vec<usize> = (0..n_channels).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&c| scores[c]).collect();
    let cut = keep.unwrap_or_else(|| elbow(&sorted)).clamp(1, n_channels);
    Ok(ChannelRanking { selected: order[..cut].to_vec(), scores, order })
}

fn elbow(sorted: &[f64]) -> usize {
    if sorted.len() < 3 {
        return sorted.len();
    }
    (1..sorted.len() - 1)
        .map(|i| (i, sorted[i - 1] - 2.0 * sorted[i] + sorted[i + 1]))
        .fold((sorted.len(), f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}
