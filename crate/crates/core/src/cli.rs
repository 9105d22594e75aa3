//! The `repclass` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::PipelineConfig;
use crate::eval::EvalReport;
use crate::io::{load_dataset, load_model, read_manifest, save_dataset, save_model, ManifestEntry};
use crate::pipeline::{dataset_from_manifest, evaluate, load_entry, ClipPrediction, ClipSummary, TrainedModel};
use crate::prep::Dataset;
use crate::synth::{generate_dataset, SynthConfig};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "repclass", version, about = "Repetition-level exercise classification from pose keypoints")]
pub struct Cli {
    /// Worker threads for clip, sample and kernel parallelism (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Pipeline configuration (TOML); defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<PipelineConfig> {
        match &self.config {
            Some(path) => PipelineConfig::load(path),
            None => Ok(PipelineConfig::default()),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment and resample the clips of a manifest into a dataset file.
    Ingest {
        /// Manifest (CSV, or JSON array when the extension is .json).
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out: PathBuf,
        /// Per-clip summary format (default: table).
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Fit transform, scaler and classifier on a whole dataset.
    Train {
        dataset: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        /// Overrides the transform seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify every repetition of one clip.
    Predict {
        model: PathBuf,
        /// Directory of per-frame keypoint JSON, or a .jsonl bundle.
        clip: PathBuf,
        /// Must describe the same preprocessing as the model.
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Participant-grouped repeated-split evaluation.
    Evaluate {
        dataset: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        /// Split seeds, comma separated (overrides the config).
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Overrides the transform seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here in `--format` (default JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the report in this format instead of the table.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Write a synthetic keypoint corpus and its manifest.
    Synth {
        /// Synthetic corpus configuration (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        participants: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn cmd_ingest(manifest: &Path, config: &PipelineConfig, out: &Path) -> Result<(Dataset, Vec<ClipSummary>)> {
    let entries = read_manifest(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let (dataset, summaries) = dataset_from_manifest(&entries, base, &config.prep)?;
    save_dataset(out, &dataset)?;
    Ok((dataset, summaries))
}

pub fn cmd_train(dataset: &Path, config: &PipelineConfig, out: &Path) -> Result<TrainedModel> {
    let dataset = load_dataset(dataset)?;
    let model = TrainedModel::fit(&dataset, config)?;
    save_model(out, &model)?;
    Ok(model)
}

/// Loads the model and the clip, then classifies each repetition. A given
/// `config` must hash to the model's preprocessing.
pub fn cmd_predict(model: &Path, clip: &Path, config: Option<&PipelineConfig>) -> Result<ClipPrediction> {
    let model = load_model(model)?;
    if let Some(config) = config {
        let found = config.prep_hash();
        if found != model.prep_hash {
            return Err(Error::ConfigMismatch { expected: model.prep_hash.clone(), found });
        }
    }
    let clip_id = clip.file_stem().map_or_else(|| "clip".to_string(), |s| s.to_string_lossy().into_owned());
    let entry = ManifestEntry {
        clip_id,
        participant_id: String::new(),
        class_label: None,
        path: clip.to_path_buf(),
        fps: 30.0,
    };
    let (seq, _) = load_entry(&entry, Path::new("."), &model.config.prep)?;
    model.predict_sequence(&seq)
}

pub fn cmd_evaluate(dataset: &Path, config: &PipelineConfig) -> Result<EvalReport> {
    evaluate(&load_dataset(dataset)?, config)
}

pub fn cmd_synth(config: &SynthConfig, out_dir: &Path) -> Result<Vec<ManifestEntry>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    generate_dataset(config, out_dir)
}

fn summaries_table(rows: &[ClipSummary]) -> String {
    let mut out =
        format!("{:<24} {:<12} {:>5} {:>7} {:>5} {:>8}\n", "clip", "participant", "label", "frames", "reps", "dropped");
    for r in rows {
        let label = r.label.map_or("-", |l| l.as_str());
        out += &format!(
            "{:<24} {:<12} {:>5} {:>7} {:>5} {:>8}\n",
            r.clip_id, r.participant_id, label, r.frames, r.reps, r.dropped
        );
    }
    out
}

fn csv_string<T: serde::Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(serde::Serialize)]
struct SummaryRow<'a> {
    clip_id: &'a str,
    participant_id: &'a str,
    label: &'a str,
    frames: usize,
    reps: usize,
    dropped: usize,
    interpolated_points: usize,
}

#[derive(serde::Serialize)]
struct RepRow<'a> {
    clip_id: &'a str,
    rep_index: usize,
    start_frame: usize,
    end_frame: usize,
    label: &'a str,
    scores: String,
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => crate::io::write_atomic(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn report_text(report: &EvalReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Ingest { manifest, config, out, format } => {
            let (dataset, summaries) = cmd_ingest(&manifest, &config.load()?, &out)?;
            let text = match format {
                None => format!(
                    "{}{} repetitions from {} clips written to {}\n",
                    summaries_table(&summaries),
                    dataset.len(),
                    summaries.len(),
                    out.display()
                ),
                Some(Format::Json) => serde_json::to_string_pretty(&summaries).expect("summaries serialise") + "\n",
                Some(Format::Csv) => csv_string(summaries.iter().map(|s| SummaryRow {
                    clip_id: &s.clip_id,
                    participant_id: &s.participant_id,
                    label: s.label.map_or("", |l| l.as_str()),
                    frames: s.frames,
                    reps: s.reps,
                    dropped: s.dropped,
                    interpolated_points: s.interpolated_points,
                }))?,
            };
            emit(&text, None, stdout)
        }
        Command::Train { dataset, config, seed, out } => {
            let mut config = config.load()?;
            if let Some(seed) = seed {
                config.transform.seed = seed;
            }
            let model = cmd_train(&dataset, &config, &out)?;
            emit(
                &format!(
                    "model written to {} (alpha {:.3e}, config {})\n",
                    out.display(),
                    model.ridge.alpha,
                    model.config_hash
                ),
                None,
                stdout,
            )
        }
        Command::Predict { model, clip, config, format, out } => {
            let config = config.config.as_deref().map(PipelineConfig::load).transpose()?;
            let prediction = cmd_predict(&model, &clip, config.as_ref())?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&prediction).expect("prediction serialises") + "\n",
                Format::Csv => csv_string(prediction.reps.iter().map(|r| RepRow {
                    clip_id: &prediction.clip_id,
                    rep_index: r.rep_index,
                    start_frame: r.start_frame,
                    end_frame: r.end_frame,
                    label: r.label.as_str(),
                    scores: r.scores.iter().map(|s| format!("{s:.6}")).collect::<Vec<_>>().join(" "),
                }))?,
            };
            emit(&text, out.as_deref(), stdout)
        }
        Command::Evaluate { dataset, config, seeds, seed, out, format } => {
            let mut config = config.load()?;
            if let Some(seeds) = seeds {
                config.evaluation.seeds = seeds;
            }
            if let Some(seed) = seed {
                config.transform.seed = seed;
            }
            let report = cmd_evaluate(&dataset, &config)?;
            if let Some(path) = &out {
                emit(&report_text(&report, format.unwrap_or(Format::Json)), Some(path), stdout)?;
            }
            match format.filter(|_| out.is_none()) {
                Some(f) => emit(&report_text(&report, f), None, stdout),
                None => emit(&report.render_table(), None, stdout),
            }
        }
        Command::Synth { config, seed, participants, out } => {
            let mut synth = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                }
                None => SynthConfig::default(),
            };
            if let Some(seed) = seed {
                synth.seed = seed;
            }
            if let Some(p) = participants {
                synth.participants = p;
            }
            let entries = cmd_synth(&synth, &out)?;
            emit(&format!("{} clips written under {}\n", entries.len(), out.display()), None, stdout)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 ok, 1 usage, 2 data error, 3 numeric failure.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            let _ = writeln!(stderr, "error: --workers must be at least 1");
            return 1;
        }
        // The global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
