//! Per-class, per-feature Gaussian statistics and the density-ratio mass
//! assignment that turns one feature reading into evidence over
//! `{normal, faulty}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::dst::{Frame, MassFunction, Subset};

/// Lower clamp on fitted standard deviations, in feature units.
pub const SIGMA_FLOOR: f64 = 1e-9;

/// Fewest non-missing training values per (class, feature).
pub const MIN_CLASS_COUNT: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Normal,
    Faulty,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 2] = [ClassLabel::Normal, ClassLabel::Faulty];

    /// 0 for normal, 1 for faulty.
    pub fn code(self) -> u8 {
        match self {
            ClassLabel::Normal => 0,
            ClassLabel::Faulty => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<ClassLabel> {
        match code {
            0 => Some(ClassLabel::Normal),
            1 => Some(ClassLabel::Faulty),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Normal => "normal",
            ClassLabel::Faulty => "faulty",
        }
    }

    pub fn other(self) -> ClassLabel {
        match self {
            ClassLabel::Normal => ClassLabel::Faulty,
            ClassLabel::Faulty => ClassLabel::Normal,
        }
    }

    /// The shared `{normal, faulty}` frame.
    pub fn frame() -> Arc<Frame> {
        static FRAME: OnceLock<Arc<Frame>> = OnceLock::new();
        Arc::clone(FRAME.get_or_init(|| {
            Arc::new(
                Frame::new(ClassLabel::ALL.map(ClassLabel::name)).expect("two distinct labels"),
            )
        }))
    }

    /// This label as a singleton of [`ClassLabel::frame`].
    pub fn subset(self) -> Subset {
        Subset::singleton(self.code() as usize)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` listed twice")]
    DuplicateFeature(String),
    #[error("no features selected")]
    NoFeatures,
    #[error("training data is not labeled")]
    Unlabeled,
    #[error("class {class} has {count} usable values for feature `{feature}`, need at least {MIN_CLASS_COUNT}")]
    InsufficientClassData {
        class: ClassLabel,
        feature: String,
        count: usize,
    },
    #[error("value {value} for feature `{feature}` is not finite")]
    NonFiniteValue { feature: String, value: f64 },
    #[error("invalid model document: {0}")]
    InvalidDocument(String),
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::UnknownFeature(_) => "UnknownFeature",
            ModelError::DuplicateFeature(_) => "DuplicateFeature",
            ModelError::NoFeatures => "NoFeatures",
            ModelError::Unlabeled => "Unlabeled",
            ModelError::InsufficientClassData { .. } => "InsufficientClassData",
            ModelError::NonFiniteValue { .. } => "NonFiniteValue",
            ModelError::InvalidDocument(_) => "InvalidDocument",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    #[serde(rename = "mu")]
    pub mean: f64,
    #[serde(rename = "sigma")]
    pub std_dev: f64,
    #[serde(rename = "n")]
    pub count: usize,
}

impl FeatureStats {
    pub fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std_dev;
        -0.5 * z * z - self.std_dev.ln() - 0.5 * (2.0 * PI).ln()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std_dev;
        (-0.5 * z * z).exp() / (2.0 * PI * self.std_dev * self.std_dev).sqrt()
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Sample mean and (n - 1) standard deviation. Values are summed in
/// ascending order so the result does not depend on record order.
fn sample_stats(values: &mut [f64]) -> FeatureStats {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut acc = CompensatedSum::default();
    values.iter().for_each(|&x| acc.add(x));
    let mean = acc.value() / n as f64;
    let mut sq = CompensatedSum::default();
    values.iter().for_each(|&x| sq.add((x - mean) * (x - mean)));
    let std_dev = (sq.value() / (n - 1) as f64).sqrt();
    FeatureStats {
        mean,
        std_dev: if std_dev >= SIGMA_FLOOR {
            std_dev
        } else {
            SIGMA_FLOOR
        },
        count: n,
    }
}

/// Class-conditional Gaussian table: one [`FeatureStats`] per (class, feature).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClassModel {
    features: Vec<String>,
    // indexed by ClassLabel::code()
    stats: [Vec<FeatureStats>; 2],
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    features: Vec<String>,
    classes: BTreeMap<ClassLabel, BTreeMap<String, FeatureStats>>,
}

impl GaussianClassModel {
    /// Builds a model from explicit statistics, `(feature, normal, faulty)`.
    pub fn from_stats(
        entries: Vec<(String, FeatureStats, FeatureStats)>,
    ) -> Result<Self, ModelError> {
        if entries.is_empty() {
            return Err(ModelError::NoFeatures);
        }
        let mut features = Vec::with_capacity(entries.len());
        let mut stats = [Vec::new(), Vec::new()];
        for (name, normal, faulty) in entries {
            if features.contains(&name) {
                return Err(ModelError::DuplicateFeature(name));
            }
            for (class, s) in [(ClassLabel::Normal, &normal), (ClassLabel::Faulty, &faulty)] {
                if !s.mean.is_finite() || !s.std_dev.is_finite() || s.std_dev < SIGMA_FLOOR {
                    return Err(ModelError::InvalidDocument(format!(
                        "{class}/{name}: need finite mu and sigma >= {SIGMA_FLOOR:e}"
                    )));
                }
                if s.count < MIN_CLASS_COUNT {
                    return Err(ModelError::InsufficientClassData {
                        class,
                        feature: name.clone(),
                        count: s.count,
                    });
                }
            }
            stats[0].push(normal);
            stats[1].push(faulty);
            features.push(name);
        }
        Ok(GaussianClassModel { features, stats })
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn feature_index(&self, feature: &str) -> Result<usize, ModelError> {
        self.features
            .iter()
            .position(|f| f == feature)
            .ok_or_else(|| ModelError::UnknownFeature(feature.to_string()))
    }

    pub fn stats(&self, class: ClassLabel, feature: &str) -> Result<FeatureStats, ModelError> {
        Ok(self.stats_at(class, self.feature_index(feature)?))
    }

    pub fn stats_at(&self, class: ClassLabel, feature_index: usize) -> FeatureStats {
        self.stats[class.code() as usize][feature_index]
    }

    /// Class-conditional density of `value` for one feature.
    pub fn pdf(&self, class: ClassLabel, feature: &str, value: f64) -> Result<f64, ModelError> {
        Ok(self.stats(class, feature)?.pdf(value))
    }

    pub fn log_pdf(&self, class: ClassLabel, feature: &str, value: f64) -> Result<f64, ModelError> {
        Ok(self.stats(class, feature)?.log_pdf(value))
    }

    /// `log ρ(normal) - log ρ(faulty)` for the feature at `feature_index`.
    pub fn log_density_ratio(&self, feature_index: usize, value: f64) -> f64 {
        self.stats_at(ClassLabel::Normal, feature_index)
            .log_pdf(value)
            - self
                .stats_at(ClassLabel::Faulty, feature_index)
                .log_pdf(value)
    }

    /// Mass on `{normal}` and `{faulty}` for one reading.
    pub fn feature_masses(&self, feature: &str, value: f64) -> Result<(f64, f64), ModelError> {
        let j = self.feature_index(feature)?;
        if !value.is_finite() {
            return Err(ModelError::NonFiniteValue {
                feature: feature.to_string(),
                value,
            });
        }
        Ok(masses_from_log_ratio(self.log_density_ratio(j, value)))
    }

    /// One reading as a Bayesian mass function over `{normal, faulty}`.
    pub fn feature_mass(&self, feature: &str, value: f64) -> Result<MassFunction, ModelError> {
        let (normal, faulty) = self.feature_masses(feature, value)?;
        Ok(MassFunction::new(
            ClassLabel::frame(),
            [
                (ClassLabel::Normal.subset(), normal),
                (ClassLabel::Faulty.subset(), faulty),
            ],
        )
        .expect("logistic masses are normalized"))
    }

    pub fn to_json(&self) -> String {
        let mut classes = BTreeMap::new();
        for class in ClassLabel::ALL {
            let per_feature = self
                .features
                .iter()
                .enumerate()
                .map(|(j, f)| (f.clone(), self.stats_at(class, j)))
                .collect();
            classes.insert(class, per_feature);
        }
        let doc = ModelDocument {
            features: self.features.clone(),
            classes,
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| ModelError::InvalidDocument(e.to_string()))?;
        let lookup = |class: ClassLabel, feature: &str| {
            doc.classes
                .get(&class)
                .and_then(|m| m.get(feature))
                .copied()
                .ok_or_else(|| {
                    ModelError::InvalidDocument(format!("no {class} statistics for `{feature}`"))
                })
        };
        let entries = doc
            .features
            .iter()
            .map(|f| {
                Ok((
                    f.clone(),
                    lookup(ClassLabel::Normal, f)?,
                    lookup(ClassLabel::Faulty, f)?,
                ))
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Self::from_stats(entries)
    }
}

/// `m({δ}) = 1 / (1 + exp(log ρ_other - log ρ_δ))`, which equals the density
/// ratio `ρ_δ / Σ ρ` but cannot produce 0/0 when both densities underflow.
pub fn masses_from_log_ratio(log_ratio: f64) -> (f64, f64) {
    let normal = 1.0 / (1.0 + (-log_ratio).exp());
    let faulty = 1.0 / (1.0 + log_ratio.exp());
    (normal, faulty)
}

/// Masses from the two class log-densities of one reading.
pub fn masses_from_log_densities(log_normal: f64, log_faulty: f64) -> (f64, f64) {
    masses_from_log_ratio(log_normal - log_faulty)
}

/// Evidence contributed by a missing reading: none.
pub fn missing_feature_mass() -> MassFunction {
    MassFunction::vacuous(ClassLabel::frame())
}

/// Fits class-conditional statistics on a labeled dataset, skipping missing
/// values. Shuffling the records leaves the result bit-for-bit unchanged.
pub fn fit<S: AsRef<str>>(
    train: &Dataset,
    features: &[S],
) -> Result<GaussianClassModel, ModelError> {
    if !train.is_labeled() {
        return Err(ModelError::Unlabeled);
    }
    if features.is_empty() {
        return Err(ModelError::NoFeatures);
    }
    let mut entries = Vec::with_capacity(features.len());
    for feature in features {
        let feature = feature.as_ref();
        let j = train
            .schema()
            .iter()
            .position(|f| f == feature)
            .ok_or_else(|| ModelError::UnknownFeature(feature.to_string()))?;
        let mut per_class: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for r in train.records() {
            if let (Some(v), Some(label)) = (r.values[j], r.label) {
                per_class[label.code() as usize].push(v);
            }
        }
        let mut stats = [None, None];
        for class in ClassLabel::ALL {
            let values = &mut per_class[class.code() as usize];
            if values.len() < MIN_CLASS_COUNT {
                return Err(ModelError::InsufficientClassData {
                    class,
                    feature: feature.to_string(),
                    count: values.len(),
                });
            }
            stats[class.code() as usize] = Some(sample_stats(values));
        }
        let [normal, faulty] = stats.map(|s| s.expect("filled above"));
        entries.push((feature.to_string(), normal, faulty));
    }
    GaussianClassModel::from_stats(entries)
}
