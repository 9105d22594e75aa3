mod common;

use rand::Rng;
use repclass::config::{PipelineConfig, PrepConfig};
use repclass::eval::{accuracy, confusion_matrix, evaluate_splits, EvalError};
use repclass::io::read_manifest;
use repclass::pipeline::{dataset_from_manifest, dataset_from_sequences, load_entry};
use repclass::pose::{extract_series, quality_gate, ChannelSpec};
use repclass::prep::{segment_repetitions, select_channels_ecp, Dataset, RepetitionSample};
use repclass::synth::{generate_corpus, generate_dataset, SynthConfig};
use repclass::{ClassLabel, MultivariateSeries};

fn small(participants: usize) -> SynthConfig {
    SynthConfig { participants, seed: 17, ..SynthConfig::default() }
}

#[test]
fn written_corpus_reloads_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = small(2);
    let entries = generate_dataset(&config, dir.path()).unwrap();
    assert_eq!(read_manifest(&dir.path().join("manifest.csv")).unwrap(), entries);
    let prep = PrepConfig::default();
    for (entry, clip) in entries.iter().zip(generate_corpus(&config).unwrap()) {
        let (loaded, report) = load_entry(entry, dir.path(), &prep).unwrap();
        assert_eq!(loaded, clip);
        assert_eq!((report.missing_person_frames, report.interpolated_points), (0, 0));
        assert!(quality_gate(&loaded, &prep.channels, &prep.quality).passed);
    }

    let again = tempfile::tempdir().unwrap();
    generate_dataset(&config, again.path()).unwrap();
    let first = std::fs::read(dir.path().join("clips/P02_Arch/P02_Arch_000000000100_keypoints.json")).unwrap();
    let second = std::fs::read(again.path().join("clips/P02_Arch/P02_Arch_000000000100_keypoints.json")).unwrap();
    assert_eq!(first, second);
    assert_eq!(
        std::fs::read(dir.path().join("manifest.csv")).unwrap(),
        std::fs::read(again.path().join("manifest.csv")).unwrap()
    );
}

#[test]
fn five_participants_give_two_hundred_reps() {
    let clips = generate_corpus(&small(5)).unwrap();
    let (dataset, summaries) = dataset_from_sequences(&clips, &PrepConfig::default()).unwrap();
    assert_eq!(dataset.len(), 200);
    assert_eq!(dataset.class_counts(), [50; 4]);
    assert!(summaries.iter().all(|s| s.reps == 10 && s.dropped == 0));
    assert!(dataset.samples().iter().all(|s| s.series.len() == 161 && s.series.n_channels() == 16));
}

#[test]
fn noiseless_clips_segment_exactly() {
    let config = SynthConfig { noise_sd_px: 0.0, ..small(3) };
    let spec = ChannelSpec::upper_body();
    for clip in generate_corpus(&config).unwrap() {
        let series = extract_series(&clip, &spec, 1).unwrap();
        let seg = segment_repetitions(&series, &Default::default()).unwrap();
        assert_eq!(seg.segments.len(), 10, "{}", clip.meta.clip_id);
        for w in seg.segments.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        for (&(s, e), &p) in seg.segments.iter().zip(&seg.peaks) {
            assert!(s <= p && p < e);
        }
    }
}

#[test]
fn manifest_and_memory_paths_agree() {
    let dir = tempfile::tempdir().unwrap();
    let config = small(2);
    let entries = generate_dataset(&config, dir.path()).unwrap();
    let prep = PrepConfig { frame_step: 3, target_length: 100, ..PrepConfig::default() };
    let (from_disk, _) = dataset_from_manifest(&entries, dir.path(), &prep).unwrap();
    let (in_memory, _) = dataset_from_sequences(&generate_corpus(&config).unwrap(), &prep).unwrap();
    assert_eq!(from_disk, in_memory);
    assert_eq!(from_disk.config_hash, prep.hash());
}

#[test]
fn hand_counted_confusion() {
    use ClassLabel::*;
    let truth = [N, N, N, N, N, A, A, A, A, A, R, R, R, R, R, Arch, Arch, Arch, Arch, Arch];
    let predicted = [N, N, N, A, N, A, A, N, A, A, R, R, R, R, Arch, Arch, Arch, R, Arch, Arch];
    let m = confusion_matrix(&truth, &predicted).unwrap();
    assert_eq!(m, [[4, 1, 0, 0], [1, 4, 0, 0], [0, 0, 4, 1], [0, 0, 1, 4]]);
    assert_eq!(accuracy(&m), 16.0 / 20.0);
    for (row, expected) in m.iter().zip([5, 5, 5, 5]) {
        assert_eq!(row.iter().sum::<usize>(), expected);
    }
}

fn toy_dataset(participants: usize, per_class: usize) -> Dataset {
    let names = vec!["c".to_string()];
    let mut ds = Dataset::new(names.clone(), 12, "h");
    for p in 0..participants {
        for label in ClassLabel::ALL {
            for rep in 0..per_class {
                let series = MultivariateSeries::new(names.clone(), vec![vec![label.index() as f64; 12]]).unwrap();
                ds.push(RepetitionSample {
                    series,
                    label,
                    participant_id: format!("p{p}"),
                    clip_id: format!("p{p}-{label}"),
                    rep_index: rep,
                })
                .unwrap();
            }
        }
    }
    ds
}

#[test]
fn oracle_and_chance_predictors() {
    let ds = toy_dataset(10, 25);
    let labels = ds.labels();
    let perfect = evaluate_splits::<_, EvalError, _, _>(
        &ds,
        0.7,
        &[0, 1, 2],
        |_| Ok(()),
        |_, test| Ok(test.iter().map(|&i| labels[i]).collect()),
    )
    .unwrap();
    assert_eq!(perfect.mean_accuracy, 1.0);
    for s in &perfect.splits {
        assert_eq!(s.test_samples, 300);
        assert!((0..4).all(|i| s.confusion[i][i] == s.test_class_counts[i]));
        assert_eq!(s.confusion.iter().flatten().sum::<usize>(), s.test_samples);
    }

    let mut r = common::rng(3);
    let chance = evaluate_splits::<_, EvalError, _, _>(
        &ds,
        0.7,
        &[0, 1, 2],
        |_| Ok(()),
        |_, test| Ok(test.iter().map(|_| ClassLabel::ALL[r.random_range(0..4)]).collect()),
    )
    .unwrap();
    // 900 Bernoulli(0.25) draws: sd about 0.0144.
    assert!((chance.mean_accuracy - 0.25).abs() < 0.06, "{}", chance.mean_accuracy);
}

#[test]
fn fit_never_sees_test_participants() {
    let ds = toy_dataset(9, 2);
    let report = evaluate_splits::<_, EvalError, _, _>(
        &ds,
        0.7,
        &[0, 1, 2, 3],
        |train| Ok(train.iter().map(|&i| ds.samples()[i].participant_id.clone()).collect::<Vec<_>>()),
        |seen, test| {
            for &i in test {
                assert!(!seen.contains(&ds.samples()[i].participant_id));
            }
            Ok(vec![ClassLabel::N; test.len()])
        },
    )
    .unwrap();
    for s in &report.splits {
        assert_eq!((s.train_participants.len(), s.test_participants.len()), (7, 2));
    }
}

#[test]
fn evaluation_is_reproducible() {
    let clips = generate_corpus(&small(4)).unwrap();
    let mut config = PipelineConfig::default();
    config.transform.num_kernels = 300;
    let (ds, _) = dataset_from_sequences(&clips, &config.prep).unwrap();
    let a = repclass::pipeline::evaluate(&ds, &config).unwrap();
    let b = repclass::pipeline::evaluate(&ds, &config).unwrap();
    assert_eq!(a.without_timings().to_json(), b.without_timings().to_json());
}

#[test]
fn ecp_scores_match_brute_force() {
    let clips = generate_corpus(&small(2)).unwrap();
    let (ds, _) = dataset_from_sequences(&clips, &PrepConfig::default()).unwrap();
    let ranking = select_channels_ecp(&ds, None).unwrap();
    for c in 0..ds.n_channels() {
        let centroid = |label: ClassLabel| -> Vec<f64> {
            let members: Vec<&RepetitionSample> = ds.samples().iter().filter(|s| s.label == label).collect();
            (0..ds.length)
                .map(|t| members.iter().map(|s| s.series.channel(c)[t]).sum::<f64>() / members.len() as f64)
                .collect()
        };
        let cents: Vec<Vec<f64>> = ClassLabel::ALL.iter().map(|&l| centroid(l)).collect();
        let mut expected = 0.0;
        for a in 0..4 {
            for b in a + 1..4 {
                expected += cents[a].iter().zip(&cents[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            }
        }
        assert!((ranking.scores[c] - expected).abs() < 1e-9 * expected.max(1.0));
    }
    // Wrist Y channels carry the A and R faults, so they rank above static parts.
    let top: Vec<&str> = ranking.order[..4].iter().map(|&i| ds.channel_names[i].as_str()).collect();
    assert!(top.contains(&"LWrist.y") && top.contains(&"RWrist.y"), "{top:?}");

    let shuffled: Vec<RepetitionSample> = ds.samples().iter().rev().cloned().collect();
    let reversed = Dataset::from_samples(ds.channel_names.clone(), ds.length, "h", shuffled).unwrap();
    assert_eq!(select_channels_ecp(&reversed, None).unwrap().order, ranking.order);
}
