//! Per-feature mass assignment, Dempster fusion across features and the
//! normal/faulty decision.
//!
//! Every per-feature mass function is Bayesian over `{normal, faulty}`, so
//! Dempster's rule reduces to a normalized product. [`Detector::classify`]
//! evaluates that product as a sum of log density ratios with a single
//! final normalization; [`Detector::classify_by_combination`] runs the
//! iterated rule and is kept as a cross-check.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{format_value, Dataset, Record};
use crate::dst::{self, DstError, MassFunction};
use crate::gaussian::{
    masses_from_log_ratio, missing_feature_mass, ClassLabel, GaussianClassModel, ModelError,
};
use crate::metrics::{self, ConfusionCounts, MetricsError, MetricsReport, RocCurve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectorError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dst(#[from] DstError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("model feature `{0}` is not in the dataset schema")]
    UnknownFeature(String),
    #[error("record has {found} values, schema has {expected}")]
    RecordWidth { expected: usize, found: usize },
    #[error("no records to evaluate")]
    EmptyDataset,
    #[error("evaluation needs a labeled dataset")]
    Unlabeled,
    #[error("fused evidence is not a number (readings {0:?})")]
    Degenerate(Vec<Option<f64>>),
}

impl DetectorError {
    pub fn code(&self) -> &'static str {
        match self {
            DetectorError::Model(e) => e.code(),
            DetectorError::Dst(e) => e.code(),
            DetectorError::Metrics(e) => e.code(),
            DetectorError::UnknownFeature(_) => "UnknownFeature",
            DetectorError::RecordWidth { .. } => "LayoutMismatch",
            DetectorError::EmptyDataset => "EmptyDataset",
            DetectorError::Unlabeled => "Unlabeled",
            DetectorError::Degenerate(_) => "NumericFailure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEvidence {
    pub feature: String,
    pub mass_normal: f64,
    pub mass_faulty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub predicted: ClassLabel,
    pub mass_normal: f64,
    pub mass_faulty: f64,
    /// Mass left on the whole frame; 1 only when every feature is missing.
    pub mass_unknown: f64,
    pub per_feature: Vec<FeatureEvidence>,
    pub missing_features: Vec<String>,
}

impl Decision {
    /// Ranking score for ROC analysis: plausibility of `faulty`.
    /// Equals `mass_faulty` whenever at least one feature was observed.
    pub fn score(&self) -> f64 {
        self.mass_faulty + self.mass_unknown
    }

    /// True when no feature contributed evidence.
    pub fn is_vacuous(&self) -> bool {
        self.per_feature.is_empty()
    }
}

/// Normal only on strictly greater normal mass; ties go to faulty.
pub fn decide(mass_normal: f64, mass_faulty: f64) -> ClassLabel {
    if mass_normal > mass_faulty {
        ClassLabel::Normal
    } else {
        ClassLabel::Faulty
    }
}

/// A model bound to a dataset schema.
#[derive(Debug, Clone)]
pub struct Detector<'m> {
    model: &'m GaussianClassModel,
    columns: Vec<usize>,
    width: usize,
}

impl<'m> Detector<'m> {
    /// Every model feature must appear in `schema`; extra schema columns are ignored.
    pub fn new<S: AsRef<str>>(
        model: &'m GaussianClassModel,
        schema: &[S],
    ) -> Result<Self, DetectorError> {
        let columns = model
            .features()
            .iter()
            .map(|f| {
                schema
                    .iter()
                    .position(|s| s.as_ref() == f)
                    .ok_or_else(|| DetectorError::UnknownFeature(f.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Detector {
            model,
            columns,
            width: schema.len(),
        })
    }

    pub fn model(&self) -> &GaussianClassModel {
        self.model
    }

    fn readings<'r>(
        &self,
        record: &'r Record,
    ) -> Result<impl Iterator<Item = (usize, Option<f64>)> + 'r, DetectorError> {
        if record.values.len() != self.width {
            return Err(DetectorError::RecordWidth {
                expected: self.width,
                found: record.values.len(),
            });
        }
        let columns = self.columns.clone();
        Ok(columns
            .into_iter()
            .enumerate()
            .map(move |(j, c)| (j, record.values[c])))
    }

    pub fn classify(&self, record: &Record) -> Result<Decision, DetectorError> {
        let features = self.model.features();
        let mut per_feature = Vec::new();
        let mut missing_features = Vec::new();
        let mut log_odds = 0.0;
        for (j, value) in self.readings(record)? {
            match value {
                Some(x) => {
                    if !x.is_finite() {
                        return Err(ModelError::NonFiniteValue {
                            feature: features[j].clone(),
                            value: x,
                        }
                        .into());
                    }
                    let ratio = self.model.log_density_ratio(j, x);
                    let (mass_normal, mass_faulty) = masses_from_log_ratio(ratio);
                    per_feature.push(FeatureEvidence {
                        feature: features[j].clone(),
                        mass_normal,
                        mass_faulty,
                    });
                    log_odds += ratio;
                }
                None => missing_features.push(features[j].clone()),
            }
        }
        if per_feature.is_empty() {
            return Ok(Decision {
                predicted: decide(0.0, 0.0),
                mass_normal: 0.0,
                mass_faulty: 0.0,
                mass_unknown: 1.0,
                per_feature,
                missing_features,
            });
        }
        if log_odds.is_nan() {
            return Err(DetectorError::Degenerate(
                self.readings(record)?.map(|(_, v)| v).collect(),
            ));
        }
        let (mass_normal, mass_faulty) = masses_from_log_ratio(log_odds);
        Ok(Decision {
            predicted: decide(mass_normal, mass_faulty),
            mass_normal,
            mass_faulty,
            mass_unknown: 0.0,
            per_feature,
            missing_features,
        })
    }

    /// The same decision computed by folding Dempster's rule over the
    /// per-feature mass functions (vacuous for missing readings).
    pub fn classify_by_combination(&self, record: &Record) -> Result<Decision, DetectorError> {
        let features = self.model.features();
        let mut masses: Vec<MassFunction> = Vec::new();
        let mut per_feature = Vec::new();
        let mut missing_features = Vec::new();
        for (j, value) in self.readings(record)? {
            match value {
                Some(x) => {
                    let m = self.model.feature_mass(&features[j], x)?;
                    per_feature.push(FeatureEvidence {
                        feature: features[j].clone(),
                        mass_normal: m.mass(ClassLabel::Normal.subset()),
                        mass_faulty: m.mass(ClassLabel::Faulty.subset()),
                    });
                    masses.push(m);
                }
                None => {
                    missing_features.push(features[j].clone());
                    masses.push(missing_feature_mass());
                }
            }
        }
        let fused = dst::combine_all(&masses)?;
        let mass_normal = fused.mass(ClassLabel::Normal.subset());
        let mass_faulty = fused.mass(ClassLabel::Faulty.subset());
        Ok(Decision {
            predicted: decide(mass_normal, mass_faulty),
            mass_normal,
            mass_faulty,
            mass_unknown: fused.mass(ClassLabel::frame().full()),
            per_feature,
            missing_features,
        })
    }
}

/// Convenience wrapper binding `model` to `schema` for a single record.
pub fn classify<S: AsRef<str>>(
    model: &GaussianClassModel,
    schema: &[S],
    record: &Record,
) -> Result<Decision, DetectorError> {
    Detector::new(model, schema)?.classify(record)
}

/// Decisions for a dataset, in record order. Labels are carried along when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub decisions: Vec<Decision>,
    pub truth: Vec<Option<ClassLabel>>,
}

/// Classifies every record (in parallel; output order equals input order).
pub fn classify_dataset(
    model: &GaussianClassModel,
    data: &Dataset,
) -> Result<Evaluation, DetectorError> {
    let detector = Detector::new(model, data.schema())?;
    let decisions = data
        .records()
        .par_iter()
        .map(|r| detector.classify(r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Evaluation {
        decisions,
        truth: data.records().iter().map(|r| r.label).collect(),
    })
}

/// Classifies a labeled test set.
pub fn evaluate(model: &GaussianClassModel, test: &Dataset) -> Result<Evaluation, DetectorError> {
    if test.is_empty() {
        return Err(DetectorError::EmptyDataset);
    }
    if !test.is_labeled() {
        return Err(DetectorError::Unlabeled);
    }
    classify_dataset(model, test)
}

impl Evaluation {
    pub fn predictions(&self) -> Vec<ClassLabel> {
        self.decisions.iter().map(|d| d.predicted).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.decisions.iter().map(Decision::score).collect()
    }

    pub fn labels(&self) -> Result<Vec<ClassLabel>, DetectorError> {
        self.truth
            .iter()
            .map(|t| t.ok_or(DetectorError::Unlabeled))
            .collect()
    }

    pub fn confusion(&self) -> Result<ConfusionCounts, DetectorError> {
        Ok(metrics::confusion(&self.predictions(), &self.labels()?)?)
    }

    pub fn metrics(&self) -> Result<MetricsReport, DetectorError> {
        Ok(metrics::compute_metrics(&self.confusion()?)?)
    }

    pub fn roc(&self) -> Result<RocCurve, DetectorError> {
        Ok(metrics::roc_curve(&self.scores(), &self.labels()?)?)
    }

    /// `index,predicted,m_normal,m_faulty,true_label`, one row per record.
    pub fn write_csv_to<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(writer);
        writeln!(w, "index,predicted,m_normal,m_faulty,true_label")?;
        for (i, (d, t)) in self.decisions.iter().zip(&self.truth).enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                i,
                d.predicted.code(),
                format_value(d.mass_normal),
                format_value(d.mass_faulty),
                t.map(|l| l.code().to_string()).unwrap_or_default()
            )?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("evaluation serializes")
    }
}
