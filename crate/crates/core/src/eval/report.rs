use std::fmt::Write as _;

use serde::Serialize;

use super::ConfusionMatrix;
use crate::ClassLabel;

/// Metrics of one grouped split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitResult {
    pub seed: u64,
    pub train_participants: Vec<String>,
    pub test_participants: Vec<String>,
    pub train_samples: usize,
    pub test_samples: usize,
    pub accuracy: f64,
    /// Rows are true classes, columns predictions, both in `N, A, R, Arch` order.
    pub confusion: ConfusionMatrix,
    pub test_class_counts: [usize; 4],
    pub train_secs: f64,
    pub test_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub classes: [ClassLabel; 4],
    pub splits: Vec<SplitResult>,
    pub mean_accuracy: f64,
    /// Population standard deviation over splits.
    pub std_accuracy: f64,
}

impl EvalReport {
    pub fn from_splits(splits: Vec<SplitResult>) -> Self {
        let n = splits.len() as f64;
        let mean = splits.iter().map(|s| s.accuracy).sum::<f64>() / n;
        let var = splits.iter().map(|s| (s.accuracy - mean).powi(2)).sum::<f64>() / n;
        Self { classes: ClassLabel::ALL, splits, mean_accuracy: mean, std_accuracy: var.sqrt() }
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.splits.iter().map(|s| s.accuracy).collect()
    }

    /// Same report with every timing field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.splits {
            s.train_secs = 0.0;
            s.test_secs = 0.0;
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One line per split.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "seed",
            "train_participants",
            "test_participants",
            "train_samples",
            "test_samples",
            "accuracy",
            "train_secs",
            "test_secs",
        ])
        .expect("in-memory write");
        for s in &self.splits {
            w.write_record([
                s.seed.to_string(),
                s.train_participants.join(" "),
                s.test_participants.join(" "),
                s.train_samples.to_string(),
                s.test_samples.to_string(),
                format!("{:.6}", s.accuracy),
                format!("{:.3}", s.train_secs),
                format!("{:.3}", s.test_secs),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>5} {:>6} {:>6} {:>9} {:>9} {:>8}",
            "seed", "train", "test", "accuracy", "train_s", "test_s"
        );
        for s in &self.splits {
            let _ = writeln!(
                out,
                "{:>5} {:>6} {:>6} {:>9.4} {:>9.2} {:>8.2}",
                s.seed, s.train_samples, s.test_samples, s.accuracy, s.train_secs, s.test_secs
            );
        }
        let _ = writeln!(
            out,
            "mean accuracy {:.4} (±{:.4}) over {} splits",
            self.mean_accuracy,
            self.std_accuracy,
            self.splits.len()
        );
        for s in &self.splits {
            let _ = writeln!(out, "\nconfusion, seed {} (rows true, columns predicted)", s.seed);
            let _ = write!(out, "{:>6}", "");
            for c in ClassLabel::ALL {
                let _ = write!(out, "{:>6}", c.as_str());
            }
            out.push('\n');
            for (c, row) in ClassLabel::ALL.iter().zip(&s.confusion) {
                let _ = write!(out, "{:>6}", c.as_str());
                for v in row {
                    let _ = write!(out, "{v:>6}");
                }
                out.push('\n');
            }
        }
        out
    }
}
