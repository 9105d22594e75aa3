//! End-to-end orchestration: clips to repetition samples, training,
//! prediction and grouped evaluation.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{PipelineConfig, PrepConfig, TransformConfig, TransformKind};
use crate::eval::{evaluate_splits, EvalReport};
use crate::io::ManifestEntry;
use crate::linear::{argmax_labels, predict_scores, ridge_fit, FeatureScaler, RidgeModel};
use crate::pose::{
    extract_series, load_sequence, quality_gate, Axis, BodyPart, ChannelSpec, KeypointSequence, LoadOptions, LoadReport,
};
use crate::prep::{resample_cubic, segment_repetitions, znormalize, Dataset, RepetitionSample, Segmentation};
use crate::rocket::{
    generate_kernels, minirocket_fit, minirocket_transform, rocket_transform, FeatureMatrix, KernelBank,
    MiniRocketParams,
};
use crate::{ClassLabel, Error, MultivariateSeries, Result};

/// Fixed-length repetitions cut from one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedClip {
    pub clip_id: String,
    pub participant_id: String,
    pub label: Option<ClassLabel>,
    pub reps: Vec<MultivariateSeries>,
    /// Inclusive first and last source frame index of each kept repetition.
    pub frame_ranges: Vec<(usize, usize)>,
    pub segmentation: Segmentation,
}

/// Per-clip ingest summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipSummary {
    pub clip_id: String,
    pub participant_id: String,
    pub label: Option<ClassLabel>,
    pub frames: usize,
    pub reps: usize,
    pub dropped: usize,
    pub interpolated_points: usize,
    pub rep_count_mismatch: Option<(usize, usize)>,
}

fn anchor_spec(prep: &PrepConfig) -> Result<ChannelSpec> {
    Ok(ChannelSpec::new(prep.segmentation.anchor_parts.clone(), vec![Axis::Y])?)
}

/// Quality gate, channel extraction, segmentation, resampling and optional
/// normalisation of one clip. Errors carry the clip id.
pub fn prepare_sequence(seq: &KeypointSequence, prep: &PrepConfig) -> Result<PreparedClip> {
    prepare_inner(seq, prep).map_err(|e| e.in_clip(&seq.meta.clip_id))
}

fn prepare_inner(seq: &KeypointSequence, prep: &PrepConfig) -> Result<PreparedClip> {
    let gate = quality_gate(seq, &prep.channels, &prep.quality);
    if !gate.passed {
        let parts = gate
            .failing_parts(&prep.quality)
            .into_iter()
            .map(|p| BodyPart::get(p).map_or_else(|| p.to_string(), |b| b.key.to_string()))
            .collect();
        return Err(Error::QualityGate { parts });
    }
    let series = extract_series(seq, &prep.channels, prep.frame_step)?;
    let anchor = extract_series(seq, &anchor_spec(prep)?, prep.frame_step)?;
    let mut segmentation = segment_repetitions(&anchor, &prep.segmentation)?;
    if let Some((expected, found)) = segmentation.rep_count_mismatch {
        log::warn!("clip {}: expected {expected} repetitions, found {found}", seq.meta.clip_id);
    }

    // The spline needs four knots; shorter cuts join the dropped list.
    let (segments, short): (Vec<_>, Vec<_>) = segmentation.segments.iter().partition(|(s, e)| e - s >= 4);
    segmentation.dropped.extend(short);
    segmentation.segments = segments;
    if !segmentation.dropped.is_empty() {
        log::info!(
            "clip {}: dropped {} short segments {:?}",
            seq.meta.clip_id,
            segmentation.dropped.len(),
            segmentation.dropped
        );
    }

    let mut reps = Vec::with_capacity(segmentation.segments.len());
    let mut frame_ranges = Vec::with_capacity(segmentation.segments.len());
    for &(start, end) in &segmentation.segments {
        let rep = resample_cubic(&series.slice(start, end), prep.target_length)?;
        reps.push(if prep.normalize { znormalize(&rep) } else { rep });
        let last = ((end - 1) * prep.frame_step).min(seq.frames.len() - 1);
        frame_ranges.push((seq.frames[start * prep.frame_step].index, seq.frames[last].index));
    }
    Ok(PreparedClip {
        clip_id: seq.meta.clip_id.clone(),
        participant_id: seq.meta.participant_id.clone(),
        label: seq.meta.class_label,
        reps,
        frame_ranges,
        segmentation,
    })
}

fn summary(clip: &PreparedClip, frames: usize, report: Option<&LoadReport>) -> ClipSummary {
    ClipSummary {
        clip_id: clip.clip_id.clone(),
        participant_id: clip.participant_id.clone(),
        label: clip.label,
        frames,
        reps: clip.reps.len(),
        dropped: clip.segmentation.dropped.len(),
        interpolated_points: report.map_or(0, |r| r.interpolated_points),
        rep_count_mismatch: clip.segmentation.rep_count_mismatch,
    }
}

fn collect_dataset(clips: Vec<PreparedClip>, prep: &PrepConfig) -> Result<Dataset> {
    let mut dataset = Dataset::new(prep.channels.channel_names(), prep.target_length, prep.hash());
    for clip in clips {
        let label = clip
            .label
            .ok_or_else(|| Error::Config("training clips need a class label".into()).in_clip(&clip.clip_id))?;
        for (rep_index, series) in clip.reps.into_iter().enumerate() {
            dataset.push(RepetitionSample {
                series,
                label,
                participant_id: clip.participant_id.clone(),
                clip_id: clip.clip_id.clone(),
                rep_index,
            })?;
        }
    }
    Ok(dataset)
}

/// Builds a dataset from in-memory clips; sample order follows clip order.
pub fn dataset_from_sequences(seqs: &[KeypointSequence], prep: &PrepConfig) -> Result<(Dataset, Vec<ClipSummary>)> {
    prep.validate()?;
    let clips: Vec<PreparedClip> = seqs.par_iter().map(|s| prepare_sequence(s, prep)).collect::<Result<_>>()?;
    let summaries = clips.iter().zip(seqs).map(|(c, s)| summary(c, s.len(), None)).collect();
    Ok((collect_dataset(clips, prep)?, summaries))
}

/// Loads one manifest row; relative paths resolve against `base_dir`.
pub fn load_entry(entry: &ManifestEntry, base_dir: &Path, prep: &PrepConfig) -> Result<(KeypointSequence, LoadReport)> {
    let path = if entry.path.is_absolute() { entry.path.clone() } else { base_dir.join(&entry.path) };
    load_sequence(&path, entry.meta(), &LoadOptions { max_gap: prep.max_gap })
        .map_err(|e| Error::from(e).in_clip(&entry.clip_id))
}

/// Builds a dataset from manifest rows; sample order follows manifest order.
pub fn dataset_from_manifest(
    entries: &[ManifestEntry],
    base_dir: &Path,
    prep: &PrepConfig,
) -> Result<(Dataset, Vec<ClipSummary>)> {
    prep.validate()?;
    let prepared: Vec<(PreparedClip, ClipSummary)> = entries
        .par_iter()
        .map(|entry| {
            let (seq, report) = load_entry(entry, base_dir, prep)?;
            let clip = prepare_sequence(&seq, prep)?;
            let s = summary(&clip, seq.len(), Some(&report));
            Ok((clip, s))
        })
        .collect::<Result<_>>()?;
    let (clips, summaries): (Vec<_>, Vec<_>) = prepared.into_iter().unzip();
    Ok((collect_dataset(clips, prep)?, summaries))
}

/// A fitted feature transform.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedTransform {
    Rocket(KernelBank),
    MiniRocket(MiniRocketParams),
}

impl FittedTransform {
    pub fn fit<S>(train: &[S], config: &TransformConfig, n_channels: usize, length: usize) -> Result<Self>
    where
        S: AsRef<MultivariateSeries> + Sync,
    {
        Ok(match config.kind {
            TransformKind::Rocket => {
                FittedTransform::Rocket(generate_kernels(config.num_kernels, n_channels, length, config.seed)?)
            }
            TransformKind::Minirocket => {
                FittedTransform::MiniRocket(minirocket_fit(train, &config.minirocket, config.seed)?)
            }
        })
    }

    pub fn transform<S>(&self, samples: &[S]) -> Result<FeatureMatrix>
    where
        S: AsRef<MultivariateSeries> + Sync,
    {
        Ok(match self {
            FittedTransform::Rocket(bank) => rocket_transform(samples, bank)?,
            FittedTransform::MiniRocket(params) => minirocket_transform(samples, params)?,
        })
    }
}

/// Scaler plus ridge fitted on already transformed features.
pub fn fit_classifier(
    features: &FeatureMatrix,
    labels: &[ClassLabel],
    alphas: &[f64],
) -> Result<(FeatureScaler, RidgeModel)> {
    let scaler = FeatureScaler::fit(features)?;
    let ridge = ridge_fit(&scaler.transform(features)?, labels, alphas)?;
    Ok((scaler, ridge))
}

/// Everything needed to classify new clips.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub config: PipelineConfig,
    pub prep_hash: String,
    pub config_hash: String,
    pub channel_names: Vec<String>,
    pub length: usize,
    pub transform: FittedTransform,
    pub scaler: FeatureScaler,
    pub ridge: RidgeModel,
}

/// Label and class scores of one repetition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepPrediction {
    pub rep_index: usize,
    pub start_frame: usize,
    pub end_frame: usize,
    pub label: ClassLabel,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipPrediction {
    pub clip_id: String,
    pub classes: Vec<ClassLabel>,
    pub reps: Vec<RepPrediction>,
    pub dropped_segments: usize,
}

fn check_prep_hash(dataset: &Dataset, config: &PipelineConfig) -> Result<()> {
    let expected = config.prep_hash();
    if dataset.config_hash != expected {
        return Err(Error::ConfigMismatch { expected, found: dataset.config_hash.clone() });
    }
    Ok(())
}

impl TrainedModel {
    /// Fits transform, scaler and ridge on every sample of `dataset`, which
    /// must have been built with `config.prep`.
    pub fn fit(dataset: &Dataset, config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        check_prep_hash(dataset, config)?;
        let samples = dataset.samples();
        let transform = FittedTransform::fit(samples, &config.transform, dataset.n_channels(), dataset.length)?;
        let features = transform.transform(samples)?;
        let (scaler, ridge) = fit_classifier(&features, &dataset.labels(), &config.classifier.alphas)?;
        Ok(Self {
            config: config.clone(),
            prep_hash: config.prep_hash(),
            config_hash: config.hash(),
            channel_names: dataset.channel_names.clone(),
            length: dataset.length,
            transform,
            scaler,
            ridge,
        })
    }

    /// Labels and per-class score rows.
    pub fn predict_samples<S>(&self, samples: &[S]) -> Result<(Vec<ClassLabel>, FeatureMatrix)>
    where
        S: AsRef<MultivariateSeries> + Sync,
    {
        let features = self.scaler.transform(&self.transform.transform(samples)?)?;
        let scores = predict_scores(&self.ridge, &features)?;
        Ok((argmax_labels(&self.ridge.classes, &scores), scores))
    }

    pub fn predict_sequence(&self, seq: &KeypointSequence) -> Result<ClipPrediction> {
        let clip = prepare_sequence(seq, &self.config.prep)?;
        let (labels, scores) = self.predict_samples(&clip.reps).map_err(|e| e.in_clip(&clip.clip_id))?;
        let reps = labels
            .into_iter()
            .enumerate()
            .map(|(i, label)| RepPrediction {
                rep_index: i,
                start_frame: clip.frame_ranges[i].0,
                end_frame: clip.frame_ranges[i].1,
                label,
                scores: scores.row(i).to_vec(),
            })
            .collect();
        Ok(ClipPrediction {
            clip_id: clip.clip_id,
            classes: self.ridge.classes.clone(),
            reps,
            dropped_segments: clip.segmentation.dropped.len(),
        })
    }
}

/// Grouped-split evaluation of the full pipeline; every split refits on its
/// training participants only.
///
/// A ROCKET bank depends only on the seed and the input shape, so the
/// features of every sample are computed once and shared across splits.
/// MiniROCKET biases come from training data and are refitted per split.
pub fn evaluate(dataset: &Dataset, config: &PipelineConfig) -> Result<EvalReport> {
    config.validate()?;
    check_prep_hash(dataset, config)?;
    let labels = dataset.labels();
    let samples = dataset.samples();
    let alphas = &config.classifier.alphas;
    let (ratio, seeds) = (config.evaluation.ratio, &config.evaluation.seeds);
    match config.transform.kind {
        TransformKind::Rocket => {
            let transform = FittedTransform::fit(samples, &config.transform, dataset.n_channels(), dataset.length)?;
            let features = transform.transform(samples)?;
            evaluate_splits(
                dataset,
                ratio,
                seeds,
                |train| {
                    let y: Vec<ClassLabel> = train.iter().map(|&i| labels[i]).collect();
                    fit_classifier(&features.select_rows(train), &y, alphas)
                },
                |(scaler, ridge), test| {
                    let x = scaler.transform(&features.select_rows(test))?;
                    Ok(argmax_labels(&ridge.classes, &predict_scores(ridge, &x)?))
                },
            )
        }
        TransformKind::Minirocket => evaluate_splits(
            dataset,
            ratio,
            seeds,
            |train| {
                let rows: Vec<&RepetitionSample> = train.iter().map(|&i| &samples[i]).collect();
                let transform = FittedTransform::fit(&rows, &config.transform, dataset.n_channels(), dataset.length)?;
                let y: Vec<ClassLabel> = train.iter().map(|&i| labels[i]).collect();
                let (scaler, ridge) = fit_classifier(&transform.transform(&rows)?, &y, alphas)?;
                Ok((transform, scaler, ridge))
            },
            |(transform, scaler, ridge), test| {
                let rows: Vec<&RepetitionSample> = test.iter().map(|&i| &samples[i]).collect();
                let x = scaler.transform(&transform.transform(&rows)?)?;
                Ok(argmax_labels(&ridge.classes, &predict_scores(ridge, &x)?))
            },
        ),
    }
}
