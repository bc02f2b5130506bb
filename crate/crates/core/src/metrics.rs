//! Confusion-matrix metrics, ROC curves and AUC. Faulty is the positive class.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::format_value;
use crate::gaussian::ClassLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("{predictions} predictions for {truth} labels")]
    LengthMismatch { predictions: usize, truth: usize },
    #[error("no records to score")]
    EmptyInput,
    #[error("confusion counts are all zero")]
    EmptyCounts,
    #[error("ROC needs both classes in the ground truth")]
    OneClassOnly,
    #[error("score {value} at position {index} is not a number")]
    InvalidScore { index: usize, value: f64 },
}

impl MetricsError {
    pub fn code(&self) -> &'static str {
        match self {
            MetricsError::LengthMismatch { .. } => "LengthMismatch",
            MetricsError::EmptyInput => "EmptyInput",
            MetricsError::EmptyCounts => "EmptyCounts",
            MetricsError::OneClassOnly => "OneClassOnly",
            MetricsError::InvalidScore { .. } => "InvalidScore",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tp")]
    pub true_positive: u64,
    #[serde(rename = "fp")]
    pub false_positive: u64,
    #[serde(rename = "tn")]
    pub true_negative: u64,
    #[serde(rename = "fn")]
    pub false_negative: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    pub fn record(&mut self, predicted: ClassLabel, truth: ClassLabel) {
        match (predicted, truth) {
            (ClassLabel::Faulty, ClassLabel::Faulty) => self.true_positive += 1,
            (ClassLabel::Faulty, ClassLabel::Normal) => self.false_positive += 1,
            (ClassLabel::Normal, ClassLabel::Normal) => self.true_negative += 1,
            (ClassLabel::Normal, ClassLabel::Faulty) => self.false_negative += 1,
        }
    }
}

pub fn confusion(
    predictions: &[ClassLabel],
    truth: &[ClassLabel],
) -> Result<ConfusionCounts, MetricsError> {
    if predictions.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
        });
    }
    if predictions.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &t) in predictions.iter().zip(truth) {
        counts.record(p, t);
    }
    Ok(counts)
}

/// `None` marks a 0/0 ratio.
fn ratio(numerator: u64, denominator: u64) -> Option<f64> {
    (denominator > 0).then(|| numerator as f64 / denominator as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub counts: ConfusionCounts,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub fpr: Option<f64>,
    pub precision: Option<f64>,
}

pub fn compute_metrics(c: &ConfusionCounts) -> Result<MetricsReport, MetricsError> {
    let total = c.total();
    if total == 0 {
        return Err(MetricsError::EmptyCounts);
    }
    Ok(MetricsReport {
        counts: *c,
        accuracy: (c.true_positive + c.true_negative) as f64 / total as f64,
        sensitivity: ratio(c.true_positive, c.true_positive + c.false_negative),
        specificity: ratio(c.true_negative, c.true_negative + c.false_positive),
        fpr: ratio(c.false_positive, c.false_positive + c.true_negative),
        precision: ratio(c.true_positive, c.true_positive + c.false_positive),
    })
}

impl MetricsReport {
    /// `(name, value)` pairs in display order.
    pub fn entries(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("accuracy", Some(self.accuracy)),
            ("sensitivity", self.sensitivity),
            ("specificity", self.specificity),
            ("fpr", self.fpr),
            ("precision", self.precision),
        ]
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {:>10} {:>10}", "metric", "ratio", "percent")?;
        for (name, value) in self.entries() {
            match value {
                Some(v) => writeln!(f, "{:<12} {:>10.6} {:>10.4}", name, v, 100.0 * v)?,
                None => writeln!(f, "{:<12} {:>10} {:>10}", name, "undefined", "undefined")?,
            }
        }
        let c = &self.counts;
        write!(
            f,
            "counts       tp={} fp={} tn={} fn={}",
            c.true_positive, c.false_positive, c.true_negative, c.false_negative
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Records with `score >= threshold` are predicted faulty. The first
    /// point uses `+inf` (nothing predicted faulty).
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

/// Sweeps every distinct score as a threshold, highest first.
pub fn roc_curve(scores: &[f64], truth: &[ClassLabel]) -> Result<RocCurve, MetricsError> {
    if scores.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: scores.len(),
            truth: truth.len(),
        });
    }
    if let Some((index, &value)) = scores.iter().enumerate().find(|(_, s)| s.is_nan()) {
        return Err(MetricsError::InvalidScore { index, value });
    }
    let positives = truth.iter().filter(|&&t| t == ClassLabel::Faulty).count() as u64;
    let negatives = truth.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::OneClassOnly);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            match truth[order[i]] {
                ClassLabel::Faulty => tp += 1,
                ClassLabel::Normal => fp += 1,
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
            threshold,
        });
    }
    Ok(RocCurve { points })
}

impl RocCurve {
    /// Trapezoidal area under the curve.
    pub fn auc(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) * 0.5)
            .sum()
    }

    pub fn write_csv_to<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(writer);
        writeln!(w, "fpr,tpr,threshold")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{}",
                format_value(p.fpr),
                format_value(p.tpr),
                format_value(p.threshold)
            )?;
        }
        w.flush()
    }
}

pub fn auc(curve: &RocCurve) -> f64 {
    curve.auc()
}
