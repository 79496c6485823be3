//! Confusion matrices, per-class precision/recall/F1, macro and weighted
//! aggregation, and the stratified K-fold cross-validation driver.
//!
//! Zero-denominator convention: precision or recall with an empty
//! denominator is 0, and F1 is 0 when precision + recall is 0.

use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledCorpus, ModeLabel};
use crate::error::{Error, Result};
use crate::pipeline::Predictor;
use crate::rng::{mix_seed, seeded};
use crate::scalar::Scalar;

/// Row = actual, column = predicted counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<usize>,
    n_classes: usize,
}

impl ConfusionMatrix {
    /// Builds the matrix from parallel label vectors.
    pub fn from_labels(y_true: &[ModeLabel], y_pred: &[ModeLabel]) -> Result<ConfusionMatrix> {
        if y_true.len() != y_pred.len() {
            return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
        }
        let n = ModeLabel::COUNT;
        let mut counts = vec![0usize; n * n];
        for (a, p) in y_true.iter().zip(y_pred) {
            counts[a.code() * n + p.code()] += 1;
        }
        Ok(ConfusionMatrix {
            counts,
            n_classes: n,
        })
    }

    /// Builds the matrix from raw counts (rows = actual class).
    pub fn from_counts(rows: &[Vec<usize>]) -> Result<ConfusionMatrix> {
        let n = rows.len();
        let mut counts = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch(n, row.len()));
            }
            counts.extend_from_slice(row);
        }
        Ok(ConfusionMatrix {
            counts,
            n_classes: n,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn get(&self, actual: usize, predicted: usize) -> usize {
        self.counts[actual * self.n_classes + predicted]
    }

    /// Row sum: number of samples whose actual class is `c`.
    pub fn support(&self, c: usize) -> usize {
        (0..self.n_classes).map(|p| self.get(c, p)).sum()
    }

    /// Column sum: number of samples predicted as `c`.
    pub fn predicted_total(&self, c: usize) -> usize {
        (0..self.n_classes).map(|a| self.get(a, c)).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn true_positives(&self, c: usize) -> usize {
        self.get(c, c)
    }

    pub fn false_positives(&self, c: usize) -> usize {
        self.predicted_total(c) - self.get(c, c)
    }

    pub fn false_negatives(&self, c: usize) -> usize {
        self.support(c) - self.get(c, c)
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let trace: usize = (0..self.n_classes).map(|c| self.get(c, c)).sum();
        trace as f64 / total as f64
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |c: usize| -> String {
            if self.n_classes == ModeLabel::COUNT {
                ModeLabel::from_code(c).unwrap().name().to_string()
            } else {
                format!("class {c}")
            }
        };
        let width = (0..self.n_classes).map(|c| name(c).len()).max().unwrap_or(8);
        writeln!(f, "{:>width$} | predicted", "actual \\")?;
        write!(f, "{:>width$} |", "")?;
        for c in 0..self.n_classes {
            write!(f, " {:>7}", c)?;
        }
        writeln!(f)?;
        for a in 0..self.n_classes {
            write!(f, "{:>width$} |", name(a))?;
            for p in 0..self.n_classes {
                write!(f, " {:>7}", self.get(a, p))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Precision, recall and F1 of one class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Per-class metrics for class `c` of a confusion matrix.
pub fn precision_recall_f1(cm: &ConfusionMatrix, c: usize) -> ClassMetrics {
    let tp = cm.true_positives(c) as f64;
    let col = cm.predicted_total(c) as f64;
    let row = cm.support(c) as f64;
    let precision = if col > 0.0 { tp / col } else { 0.0 };
    let recall = if row > 0.0 { tp / row } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        support: cm.support(c),
    }
}

/// Full evaluation report: per-class rows plus macro and weighted averages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub accuracy: f64,
    pub total: usize,
}

impl MetricsReport {
    pub fn from_confusion(cm: &ConfusionMatrix) -> MetricsReport {
        let n = cm.n_classes();
        let per_class: Vec<ClassMetrics> = (0..n).map(|c| precision_recall_f1(cm, c)).collect();
        let total = cm.total();
        let total_f = total as f64;
        let mut macro_p = 0.0;
        let mut macro_r = 0.0;
        let mut macro_f = 0.0;
        let mut w_p = 0.0;
        let mut w_r = 0.0;
        let mut w_f = 0.0;
        for m in &per_class {
            macro_p += m.precision;
            macro_r += m.recall;
            macro_f += m.f1;
            if total > 0 {
                let w = m.support as f64 / total_f;
                w_p += w * m.precision;
                w_r += w * m.recall;
                w_f += w * m.f1;
            }
        }
        MetricsReport {
            per_class,
            macro_precision: macro_p / n as f64,
            macro_recall: macro_r / n as f64,
            macro_f1: macro_f / n as f64,
            weighted_precision: w_p,
            weighted_recall: w_r,
            weighted_f1: w_f,
            accuracy: cm.accuracy(),
            total,
        }
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |c: usize| -> &'static str {
            if self.per_class.len() == ModeLabel::COUNT {
                ModeLabel::from_code(c).unwrap().name()
            } else {
                "class"
            }
        };
        writeln!(
            f,
            "{:<28} {:>9} {:>9} {:>9} {:>8}",
            "class", "precision", "recall", "f1", "support"
        )?;
        for (c, m) in self.per_class.iter().enumerate() {
            writeln!(
                f,
                "{:<28} {:>9.4} {:>9.4} {:>9.4} {:>8}",
                name(c),
                m.precision,
                m.recall,
                m.f1,
                m.support
            )?;
        }
        writeln!(
            f,
            "{:<28} {:>9.4} {:>9.4} {:>9.4} {:>8}",
            "Macro average", self.macro_precision, self.macro_recall, self.macro_f1, self.total
        )?;
        writeln!(
            f,
            "{:<28} {:>9.4} {:>9.4} {:>9.4} {:>8}",
            "Weighted average",
            self.weighted_precision,
            self.weighted_recall,
            self.weighted_f1,
            self.total
        )?;
        write!(f, "accuracy: {:.4}", self.accuracy)
    }
}

/// Per-fold scores with their mean and sample standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl CvResult {
    pub fn from_scores(fold_scores: Vec<f64>) -> CvResult {
        let k = fold_scores.len() as f64;
        let mean = fold_scores.iter().sum::<f64>() / k;
        let var = if fold_scores.len() > 1 {
            fold_scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        CvResult {
            fold_scores,
            mean,
            std: var.sqrt(),
        }
    }
}

/// Seeded stratified fold assignment: per class, members are shuffled and
/// dealt round-robin over the `k` folds. Every class present must have at
/// least `k` members.
pub fn stratified_folds(y: &[ModeLabel], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidFoldCount(k));
    }
    let mut rng = seeded(seed);
    let mut assignment = vec![0usize; y.len()];
    for mode in ModeLabel::ALL {
        let mut members: Vec<usize> = y
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == mode)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                label: mode.name().to_string(),
                count: members.len(),
                needed: k,
            });
        }
        members.shuffle(&mut rng);
        for (j, &row) in members.iter().enumerate() {
            assignment[row] = j % k;
        }
    }
    Ok(assignment)
}

/// Stratified K-fold cross-validation of a whole fitting procedure.
///
/// For each fold, `fit` receives the k-1 training folds as a corpus plus a
/// derived seed, and the returned model is scored by weighted F1 on the
/// held-out fold. Preprocessing must be fitted inside `fit` so nothing leaks
/// from the held-out fold.
pub fn cross_validate<T, P, F>(
    corpus: &LabeledCorpus<T>,
    k: usize,
    seed: u64,
    mut fit: F,
) -> Result<CvResult>
where
    T: Scalar,
    P: Predictor<T>,
    F: FnMut(&LabeledCorpus<T>, u64) -> Result<P>,
{
    let labels = corpus.labels_in_order();
    let assignment = stratified_folds(&labels, k, seed)?;
    let mut scores = Vec::with_capacity(k);
    for fold in 0..k {
        let train_idx: Vec<usize> = (0..corpus.len()).filter(|i| assignment[*i] != fold).collect();
        let test_idx: Vec<usize> = (0..corpus.len()).filter(|i| assignment[*i] == fold).collect();
        let train = corpus.subset(&train_idx);
        let test = corpus.subset(&test_idx);
        let model = fit(&train, mix_seed(seed, fold as u64))?;
        let predicted = model.predict_labels(test.records())?;
        let truth = test.labels_in_order();
        let cm = ConfusionMatrix::from_labels(&truth, &predicted)?;
        scores.push(MetricsReport::from_confusion(&cm).weighted_f1);
    }
    Ok(CvResult::from_scores(scores))
}
