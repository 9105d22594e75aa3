//! Participant-grouped splits, confusion matrices and evaluation reports.

mod report;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use report::{EvalReport, SplitResult};

use crate::prep::Dataset;
use crate::ClassLabel;

pub const DEFAULT_RATIO: f64 = 0.7;
pub const DEFAULT_SEEDS: [u64; 3] = [0, 1, 2];

pub type ConfusionMatrix = [[usize; 4]; 4];

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("need at least 2 participants, found {0}")]
    TooFewParticipants(usize),
    #[error("split ratio {0} outside (0, 1]")]
    InvalidRatio(f64),
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("participant {0} on both sides of a split")]
    Leakage(String),
    #[error("no split seeds given")]
    NoSplits,
}

/// Participants assigned to each side of one split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitPlan {
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
    pub ratio: f64,
}

impl SplitPlan {
    /// Sample indices of `dataset` on the train and test side, in dataset order.
    pub fn sample_indices(&self, dataset: &Dataset) -> (Vec<usize>, Vec<usize>) {
        let train: BTreeSet<&str> = self.train.iter().map(String::as_str).collect();
        (0..dataset.len()).partition(|&i| train.contains(dataset.samples()[i].participant_id.as_str()))
    }

    pub fn check_disjoint(&self) -> Result<(), EvalError> {
        let train: BTreeSet<&String> = self.train.iter().collect();
        match self.test.iter().find(|p| train.contains(p)) {
            Some(p) => Err(EvalError::Leakage(p.clone())),
            None => Ok(()),
        }
    }
}

/// Shuffles the sorted unique participant ids with a ChaCha8 stream seeded
/// by `seed` and puts the first `ceil(ratio * P)` on the train side.
pub fn split_participants(participants: &[String], ratio: f64, seed: u64) -> Result<SplitPlan, EvalError> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(EvalError::InvalidRatio(ratio));
    }
    let mut ids: Vec<String> = participants.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if ids.len() < 2 {
        return Err(EvalError::TooFewParticipants(ids.len()));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    // Guard against 0.7 * 10 landing a hair above 7.
    let n_train = ((ratio * ids.len() as f64) - 1e-9).ceil() as usize;
    let test = ids.split_off(n_train.min(ids.len()));
    Ok(SplitPlan { train: ids, test, seed, ratio })
}

pub fn grouped_split(dataset: &Dataset, ratio: f64, seed: u64) -> Result<SplitPlan, EvalError> {
    split_participants(&dataset.participants(), ratio, seed)
}

/// Entry `[i][j]` counts samples of true class `i` predicted as class `j`,
/// classes in `N, A, R, Arch` order.
pub fn confusion_matrix(truth: &[ClassLabel], predicted: &[ClassLabel]) -> Result<ConfusionMatrix, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch { truth: truth.len(), predicted: predicted.len() });
    }
    let mut m = [[0; 4]; 4];
    for (t, p) in truth.iter().zip(predicted) {
        m[t.index()][p.index()] += 1;
    }
    Ok(m)
}

/// Trace over total; `NaN` for an empty matrix.
pub fn accuracy(confusion: &ConfusionMatrix) -> f64 {
    let total: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..4).map(|i| confusion[i][i]).sum();
    correct as f64 / total as f64
}

/// Runs one grouped split per seed. `fit` sees only training sample indices;
/// `predict` returns one label per test index.
pub fn evaluate_splits<M, E, Fit, Predict>(
    dataset: &Dataset,
    ratio: f64,
    seeds: &[u64],
    mut fit: Fit,
    mut predict: Predict,
) -> Result<EvalReport, E>
where
    E: From<EvalError>,
    Fit: FnMut(&[usize]) -> Result<M, E>,
    Predict: FnMut(&M, &[usize]) -> Result<Vec<ClassLabel>, E>,
{
    if seeds.is_empty() {
        return Err(EvalError::NoSplits.into());
    }
    let labels = dataset.labels();
    let mut splits = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let plan = grouped_split(dataset, ratio, seed)?;
        plan.check_disjoint()?;
        let (train, test) = plan.sample_indices(dataset);

        let started = Instant::now();
        let model = fit(&train)?;
        let train_secs = started.elapsed().as_secs_f64();

        let started = Instant::now();
        let predicted = if test.is_empty() { Vec::new() } else { predict(&model, &test)? };
        let test_secs = started.elapsed().as_secs_f64();

        let truth: Vec<ClassLabel> = test.iter().map(|&i| labels[i]).collect();
        let confusion = confusion_matrix(&truth, &predicted)?;
        let mut test_class_counts = [0; 4];
        for t in &truth {
            test_class_counts[t.index()] += 1;
        }
        log::info!("split seed {seed}: accuracy {:.4} on {} test samples", accuracy(&confusion), test.len());
        splits.push(SplitResult {
            seed,
            train_participants: plan.train,
            test_participants: plan.test,
            train_samples: train.len(),
            test_samples: test.len(),
            accuracy: accuracy(&confusion),
            confusion,
            test_class_counts,
            train_secs,
            test_secs,
        });
    }
    Ok(EvalReport::from_splits(splits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("P{i:02}")).collect()
    }

    #[test]
    fn ceil_rounding() {
        let plan = split_participants(&ids(53), 0.7, 0).unwrap();
        assert_eq!((plan.train.len(), plan.test.len()), (38, 15));
        let plan = split_participants(&ids(10), 0.7, 0).unwrap();
        assert_eq!((plan.train.len(), plan.test.len()), (7, 3));
        let plan = split_participants(&ids(5), 1.0, 3).unwrap();
        assert!(plan.test.is_empty());
    }

    #[test]
    fn split_is_partition_and_seeded() {
        for seed in 0..20 {
            let plan = split_participants(&ids(12), 0.7, seed).unwrap();
            plan.check_disjoint().unwrap();
            let mut all: Vec<_> = plan.train.iter().chain(&plan.test).cloned().collect();
            all.sort();
            assert_eq!(all, ids(12));
            assert_eq!(plan, split_participants(&ids(12), 0.7, seed).unwrap());
        }
        assert_ne!(split_participants(&ids(12), 0.7, 0).unwrap(), split_participants(&ids(12), 0.7, 1).unwrap());
    }

    #[test]
    fn split_errors() {
        assert_eq!(split_participants(&ids(1), 0.7, 0), Err(EvalError::TooFewParticipants(1)));
        assert_eq!(split_participants(&ids(4), 0.0, 0), Err(EvalError::InvalidRatio(0.0)));
        // Duplicates collapse to one participant.
        assert_eq!(split_participants(&["a".into(), "a".into()], 0.5, 0), Err(EvalError::TooFewParticipants(1)));
    }

    #[test]
    fn confusion_basics() {
        use ClassLabel::*;
        let truth = [N, A, R, Arch, N];
        let m = confusion_matrix(&truth, &truth).unwrap();
        assert_eq!(m, [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(accuracy(&m), 1.0);
        let swapped = confusion_matrix(&truth, &[A, N, R, Arch, N]).unwrap();
        assert_eq!((swapped[0][1], swapped[1][0]), (1, 1));
        assert!((accuracy(&swapped) - 0.6).abs() < 1e-15);
        assert!(matches!(confusion_matrix(&truth, &[N]), Err(EvalError::LengthMismatch { truth: 5, predicted: 1 })));
    }
}
