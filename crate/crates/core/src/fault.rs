//! Gain, offset, data-loss and out-of-bounds fault injection.
//!
//! A [`FaultSpec`] applied to a clean dataset picks `round(rate * N)`
//! records with a seeded Fisher-Yates shuffle, faults every target feature
//! of those records together and labels them faulty.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, Layout};
use crate::gaussian::ClassLabel;
use crate::rng::{self, SeededRng};

/// Out-of-bounds values land at least this fraction of the bound width outside.
pub const OOB_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaultError {
    #[error("fault rate {0} is not in (0, 1]")]
    RateOutOfRange(f64),
    #[error("bounds [{lower}, {upper}] for `{feature}` are not an increasing finite pair")]
    InvalidBounds {
        feature: String,
        lower: f64,
        upper: f64,
    },
    #[error("noise standard deviation {0} must be finite and >= 0")]
    InvalidNoise(f64),
    #[error("parameter {name} = {value} is not finite")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("unknown target feature `{0}`")]
    UnknownFeature(String),
    #[error(
        "record {record} is missing `{feature}`; clean input must be complete in target features"
    )]
    MissingInput { record: usize, feature: String },
    #[error("unknown fault kind `{0}` (expected gain, offset, data-loss or oob)")]
    UnknownKind(String),
}

impl FaultError {
    pub fn code(&self) -> &'static str {
        match self {
            FaultError::RateOutOfRange(_) => "RateOutOfRange",
            FaultError::InvalidBounds { .. } => "InvalidBounds",
            FaultError::InvalidNoise(_) => "InvalidNoise",
            FaultError::InvalidParameter { .. } => "InvalidParameter",
            FaultError::EmptyDataset => "EmptyDataset",
            FaultError::UnknownFeature(_) => "UnknownFeature",
            FaultError::MissingInput { .. } => "MissingInput",
            FaultError::UnknownKind(_) => "UnknownFaultKind",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultKind {
    Gain,
    Offset,
    DataLoss,
    #[serde(rename = "oob")]
    OutOfBounds,
}

impl FaultKind {
    pub const ALL: [FaultKind; 4] = [
        FaultKind::Gain,
        FaultKind::Offset,
        FaultKind::DataLoss,
        FaultKind::OutOfBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FaultKind::Gain => "gain",
            FaultKind::Offset => "offset",
            FaultKind::DataLoss => "data-loss",
            FaultKind::OutOfBounds => "oob",
        }
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FaultKind {
    type Err = FaultError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "gain" => Ok(FaultKind::Gain),
            "offset" => Ok(FaultKind::Offset),
            "data-loss" | "dataloss" => Ok(FaultKind::DataLoss),
            "oob" | "out-of-bounds" => Ok(FaultKind::OutOfBounds),
            _ => Err(FaultError::UnknownKind(s.to_string())),
        }
    }
}

/// Normal operating range `[lower, upper]` of a feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }

    fn validate(self, feature: &str) -> Result<Bounds, FaultError> {
        if self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper {
            Ok(self)
        } else {
            Err(FaultError::InvalidBounds {
                feature: feature.to_string(),
                lower: self.lower,
                upper: self.upper,
            })
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub kind: FaultKind,
    /// Offset constant (offset faults only).
    pub alpha: f64,
    /// Gain factor (gain faults only).
    pub beta: f64,
    /// Standard deviation of the zero-mean Gaussian noise term; 0 disables it.
    pub noise_std: f64,
    /// Bounds for every target feature; `None` uses the clean data's min/max.
    pub bounds: Option<Bounds>,
    /// Per-feature bounds, taking precedence over `bounds`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub feature_bounds: BTreeMap<String, Bounds>,
    pub rate: f64,
    pub seed: u64,
    /// Features to fault; `None` means the whole schema.
    pub target_features: Option<Vec<String>>,
}

impl FaultSpec {
    pub fn new(kind: FaultKind, rate: f64, seed: u64) -> Self {
        FaultSpec {
            kind,
            alpha: 0.0,
            beta: 1.0,
            noise_std: 0.0,
            bounds: None,
            feature_bounds: BTreeMap::new(),
            rate,
            seed,
            target_features: None,
        }
    }

    pub fn gain(beta: f64, rate: f64, seed: u64) -> Self {
        FaultSpec {
            beta,
            ..Self::new(FaultKind::Gain, rate, seed)
        }
    }

    pub fn offset(alpha: f64, rate: f64, seed: u64) -> Self {
        FaultSpec {
            alpha,
            ..Self::new(FaultKind::Offset, rate, seed)
        }
    }

    pub fn data_loss(rate: f64, seed: u64) -> Self {
        Self::new(FaultKind::DataLoss, rate, seed)
    }

    pub fn out_of_bounds(rate: f64, seed: u64) -> Self {
        Self::new(FaultKind::OutOfBounds, rate, seed)
    }

    pub fn with_noise(mut self, noise_std: f64) -> Self {
        self.noise_std = noise_std;
        self
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn with_feature_bounds(mut self, feature: impl Into<String>, bounds: Bounds) -> Self {
        self.feature_bounds.insert(feature.into(), bounds);
        self
    }

    pub fn with_targets<S: Into<String>>(mut self, features: impl IntoIterator<Item = S>) -> Self {
        self.target_features = Some(features.into_iter().map(Into::into).collect());
        self
    }

    pub fn validate(&self) -> Result<(), FaultError> {
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(FaultError::RateOutOfRange(self.rate));
        }
        if !self.noise_std.is_finite() || self.noise_std < 0.0 {
            return Err(FaultError::InvalidNoise(self.noise_std));
        }
        match self.kind {
            FaultKind::Gain if !self.beta.is_finite() => Err(FaultError::InvalidParameter {
                name: "beta",
                value: self.beta,
            }),
            FaultKind::Offset if !self.alpha.is_finite() => Err(FaultError::InvalidParameter {
                name: "alpha",
                value: self.alpha,
            }),
            FaultKind::OutOfBounds => {
                if let Some(b) = self.bounds {
                    b.validate("*")?;
                }
                for (f, b) in &self.feature_bounds {
                    b.validate(f)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of records this plan faults in a dataset of `n`.
    pub fn fault_count(&self, n: usize) -> usize {
        (self.rate * n as f64).round() as usize
    }
}

/// `βx + η`.
pub fn inject_gain(x: f64, beta: f64, noise: f64) -> f64 {
    beta * x + noise
}

/// `α + x + η`.
pub fn inject_offset(x: f64, alpha: f64, noise: f64) -> f64 {
    alpha + x + noise
}

/// The reading is lost.
pub fn inject_data_loss(_x: Option<f64>) -> Option<f64> {
    None
}

/// Replaces a reading with one strictly outside `[lower, upper]`.
///
/// `draw` in `[0, 1)` picks the side (below for `draw < 0.5`) and, rescaled
/// to `[0, 1)` within its half, the displacement as a fraction of the
/// bound width. Every output is at least `OOB_MARGIN * width` outside.
pub fn inject_out_of_bounds(_x: f64, bounds: Bounds, draw: f64) -> Result<f64, FaultError> {
    let bounds = bounds.validate("*")?;
    let width = bounds.upper - bounds.lower;
    let draw = draw.clamp(0.0, 1.0);
    let (below, fraction) = if draw < 0.5 {
        (true, 2.0 * draw)
    } else {
        (false, 2.0 * draw - 1.0)
    };
    let displacement = fraction * width + OOB_MARGIN * width;
    let value = if below {
        let v = bounds.lower - displacement;
        if v < bounds.lower {
            v
        } else {
            bounds.lower.next_down()
        }
    } else {
        let v = bounds.upper + displacement;
        if v > bounds.upper {
            v
        } else {
            bounds.upper.next_up()
        }
    };
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultedRecord {
    pub index: usize,
    /// Original target-feature values, in `InjectionReport::target_features` order.
    pub original: Vec<Option<f64>>,
}

/// Audit trail of one plan application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionReport {
    pub kind: FaultKind,
    pub spec: FaultSpec,
    pub total_records: usize,
    pub target_features: Vec<String>,
    /// Bounds actually used per target feature (out-of-bounds faults only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub resolved_bounds: BTreeMap<String, Bounds>,
    /// Sorted ascending by index.
    pub faulted: Vec<FaultedRecord>,
}

impl InjectionReport {
    pub fn faulted_indices(&self) -> Vec<usize> {
        self.faulted.iter().map(|r| r.index).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn noise(rng: &mut SeededRng, std: f64) -> f64 {
    if std > 0.0 {
        let z: f64 = StandardNormal.sample(rng);
        std * z
    } else {
        0.0
    }
}

fn observed_range(clean: &Dataset, j: usize) -> Bounds {
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for v in clean.records().iter().filter_map(|r| r.values[j]) {
        lower = lower.min(v);
        upper = upper.max(v);
    }
    Bounds { lower, upper }
}

/// Faults `round(rate * N)` records of `clean` and returns the labeled result.
///
/// Selected records become faulty; the rest keep their input label, or
/// become normal when the input is unlabeled. `clean` is not modified.
pub fn apply_fault_plan(
    clean: &Dataset,
    spec: &FaultSpec,
) -> Result<(Dataset, InjectionReport), FaultError> {
    spec.validate()?;
    if clean.is_empty() {
        return Err(FaultError::EmptyDataset);
    }
    let targets: Vec<String> = match &spec.target_features {
        Some(t) => t.clone(),
        None => clean.schema().to_vec(),
    };
    let target_idx = targets
        .iter()
        .map(|f| {
            clean
                .schema()
                .iter()
                .position(|s| s == f)
                .ok_or_else(|| FaultError::UnknownFeature(f.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (i, r) in clean.records().iter().enumerate() {
        for (&j, f) in target_idx.iter().zip(&targets) {
            if r.values[j].is_none() {
                return Err(FaultError::MissingInput {
                    record: i,
                    feature: f.clone(),
                });
            }
        }
    }

    let mut resolved_bounds = BTreeMap::new();
    if spec.kind == FaultKind::OutOfBounds {
        for (&j, f) in target_idx.iter().zip(&targets) {
            let b = spec
                .feature_bounds
                .get(f)
                .copied()
                .or(spec.bounds)
                .unwrap_or_else(|| observed_range(clean, j));
            resolved_bounds.insert(f.clone(), b.validate(f)?);
        }
    }

    let n = clean.len();
    let mut rng = rng::stream(spec.seed, rng::Stream::Fault);
    let mut selected = rng::permutation(n, &mut rng);
    selected.truncate(spec.fault_count(n));
    selected.sort_unstable();

    let mut records = clean.records().to_vec();
    let mut faulted = Vec::with_capacity(selected.len());
    for &i in &selected {
        let record = &mut records[i];
        let mut original = Vec::with_capacity(target_idx.len());
        for (&j, f) in target_idx.iter().zip(&targets) {
            let x = record.values[j];
            original.push(x);
            let x = x.expect("checked complete");
            record.values[j] = match spec.kind {
                FaultKind::Gain => Some(inject_gain(x, spec.beta, noise(&mut rng, spec.noise_std))),
                FaultKind::Offset => Some(inject_offset(
                    x,
                    spec.alpha,
                    noise(&mut rng, spec.noise_std),
                )),
                FaultKind::DataLoss => inject_data_loss(Some(x)),
                FaultKind::OutOfBounds => {
                    let draw: f64 = rng.random();
                    Some(inject_out_of_bounds(x, resolved_bounds[f], draw)?)
                }
            };
        }
        record.label = Some(ClassLabel::Faulty);
        faulted.push(FaultedRecord { index: i, original });
    }

    for r in &mut records {
        r.label.get_or_insert(ClassLabel::Normal);
    }
    let layout = Layout {
        labeled: true,
        ..clean.layout()
    };
    let out = Dataset::new(clean.schema().to_vec(), layout, records)
        .expect("faulting keeps the record layout");
    let report = InjectionReport {
        kind: spec.kind,
        spec: spec.clone(),
        total_records: n,
        target_features: targets,
        resolved_bounds,
        faulted,
    };
    Ok((out, report))
}
