use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use dste_core::fault::{Bounds, FaultKind};
use serde::Serialize;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "dste",
    version,
    about = "Evidence-theory sensor fault detection toolkit"
)]
pub struct Cli {
    /// Where to write the run manifest (default: `<primary output>.manifest.json`).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw a labeled synthetic dataset from per-class Gaussians.
    Generate(GenerateArgs),
    /// Inject one fault type into a dataset.
    Inject(InjectArgs),
    /// Fit the per-class Gaussian model, optionally holding out a test set.
    Fit(FitArgs),
    /// Classify every record of a dataset.
    Classify(ClassifyArgs),
    /// Classify a labeled test set and report metrics and the ROC curve.
    Evaluate(EvaluateArgs),
    /// Run the inject/fit/evaluate pipeline over a grid of fault settings.
    Sweep(SweepArgs),
    /// Normal probability plot of one feature.
    ProbeNormality(ProbeArgs),
}

/// `feature=lower:upper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureBounds {
    pub feature: String,
    pub bounds: Bounds,
}

impl FromStr for FeatureBounds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("expected feature=lower:upper, got `{s}`");
        let (feature, range) = s.split_once('=').ok_or_else(err)?;
        let (lo, hi) = range.split_once(':').ok_or_else(err)?;
        let lower: f64 = lo.trim().parse().map_err(|_| err())?;
        let upper: f64 = hi.trim().parse().map_err(|_| err())?;
        if feature.trim().is_empty() {
            return Err(err());
        }
        Ok(FeatureBounds {
            feature: feature.trim().to_string(),
            bounds: Bounds::new(lower, upper),
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_delimiter = ',', default_value = "temperature,humidity")]
    pub features: Vec<String>,
    /// Normal-class means, one per feature (a single value applies to all).
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub normal_mu: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub normal_sigma: Vec<f64>,
    /// Anomaly-class means; required when --n-faulty > 0.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub faulty_mu: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub faulty_sigma: Vec<f64>,
    /// Number of normal records.
    #[arg(long)]
    pub n: usize,
    /// Number of anomalous records mixed in at seeded positions.
    #[arg(long, default_value_t = 0)]
    pub n_faulty: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Fault parameters shared by `inject` and `sweep`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FaultParams {
    /// Offset constant (offset faults).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub eta_std: f64,
    /// Lower bound of the normal range for every target feature (out-of-bounds faults).
    #[arg(long, allow_negative_numbers = true, requires = "gamma2")]
    pub gamma1: Option<f64>,
    /// Upper bound of the normal range for every target feature.
    #[arg(long, allow_negative_numbers = true, requires = "gamma1")]
    pub gamma2: Option<f64>,
    /// Per-feature range override, `feature=lower:upper`; repeatable.
    #[arg(
        long = "bounds",
        value_name = "FEATURE=LO:HI",
        allow_hyphen_values = true
    )]
    pub feature_bounds: Vec<FeatureBounds>,
    /// Features to fault (default: all).
    #[arg(long = "features", value_delimiter = ',')]
    pub targets: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InjectArgs {
    #[arg(long)]
    pub fault: FaultKind,
    #[arg(long)]
    pub rate: f64,
    /// Gain factor (gain faults).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[command(flatten)]
    pub params: FaultParams,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Column mapping for the input, e.g. `temperature=temp,label=is_faulty`.
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Injection report (default: `<out>.report.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub schema: Option<String>,
    /// Features to model (default: every feature column).
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.7, conflicts_with = "no_split")]
    pub split_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    /// Held-out records (default: `<out>.test.csv`).
    #[arg(long, conflicts_with = "no_split")]
    pub test_out: Option<PathBuf>,
    /// Fit on the whole file.
    #[arg(long)]
    pub no_split: bool,
    /// Cut in file order instead of shuffling first.
    #[arg(long)]
    pub no_shuffle: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(long)]
    pub out_report: PathBuf,
    #[arg(long)]
    pub out_roc: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Clean input data; every cell injects into a fresh copy.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "gain,offset,data-loss,oob"
    )]
    pub faults: Vec<FaultKind>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
    pub rates: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "2,4,6,8,10",
        allow_negative_numbers = true
    )]
    pub betas: Vec<f64>,
    #[command(flatten)]
    pub params: FaultParams,
    #[arg(long, default_value_t = 0.7)]
    pub split_fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(long)]
    pub feature: String,
    #[arg(long)]
    pub out: PathBuf,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Inject(_) => "inject",
            Command::Fit(_) => "fit",
            Command::Classify(_) => "classify",
            Command::Evaluate(_) => "evaluate",
            Command::Sweep(_) => "sweep",
            Command::ProbeNormality(_) => "probe-normality",
        }
    }

    pub fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Generate(_) => vec![],
            Command::Inject(a) => vec![&a.input],
            Command::Fit(a) => vec![&a.train],
            Command::Classify(a) => vec![&a.model, &a.input],
            Command::Evaluate(a) => vec![&a.model, &a.test],
            Command::Sweep(a) => vec![&a.input],
            Command::ProbeNormality(a) => vec![&a.input],
        }
    }

    /// The output the manifest path is derived from.
    pub fn primary_output(&self) -> &Path {
        match self {
            Command::Generate(a) => &a.out,
            Command::Inject(a) => &a.out,
            Command::Fit(a) => &a.out,
            Command::Classify(a) => &a.out,
            Command::Evaluate(a) => &a.out_report,
            Command::Sweep(a) => &a.out,
            Command::ProbeNormality(a) => &a.out,
        }
    }
}
