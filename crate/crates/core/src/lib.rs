//! Sensor fault detection by Dempster-Shafer fusion of per-feature Gaussian
//! evidence, with a seeded fault injector and the evaluation metrics used
//! to score it.
//!
//! The usual flow is [`generate_synthetic`] or [`read_csv`], then
//! [`apply_fault_plan`], [`split`], [`fit`] and [`evaluate`].

pub mod dataset;
pub mod detector;
pub mod dst;
pub mod fault;
pub mod gaussian;
pub mod metrics;
pub mod rng;

pub use dataset::{
    generate_synthetic, normality_probe, read_csv, split, split_chronological, write_csv,
    CsvSchema, Dataset, DatasetError, GaussianParams, Layout, ProbabilityPlot, Record,
    SyntheticFeature, SyntheticSpec, Timestamp,
};
pub use detector::{
    classify, classify_dataset, evaluate, Decision, Detector, DetectorError, Evaluation,
};
pub use dst::{combine, combine_all, conflict_factor, DstError, Frame, MassFunction, Subset};
pub use fault::{apply_fault_plan, Bounds, FaultError, FaultKind, FaultSpec, InjectionReport};
pub use gaussian::{
    fit, missing_feature_mass, ClassLabel, FeatureStats, GaussianClassModel, ModelError,
};
pub use metrics::{
    compute_metrics, confusion, roc_curve, ConfusionCounts, MetricsError, MetricsReport, RocCurve,
};
