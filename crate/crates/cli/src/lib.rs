//! Command-line front end: argument types, subcommand runners and run
//! manifests. `dste` is a thin wrapper around [`main_with`].

pub mod args;
pub mod error;
pub mod manifest;
pub mod sweep;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use dste_core::dataset::{
    self, generate_synthetic, normality_probe, read_csv, split, split_chronological, write_csv,
    CsvSchema, Dataset, GaussianParams, SyntheticFeature, SyntheticSpec,
};
use dste_core::fault::{apply_fault_plan, Bounds, FaultKind, FaultSpec};
use dste_core::gaussian::GaussianClassModel;
use dste_core::metrics::MetricsReport;
use dste_core::{classify_dataset, evaluate, fit};
use serde::Serialize;

pub use args::{Cli, Command};
pub use error::{CliError, ErrorClass};
pub use manifest::{RunManifest, VERSION};

/// Parses `args`, runs the subcommand, writes its manifest and returns the
/// process exit code. Parse failures exit 2 without a manifest.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let result = execute(&cli.command, stdout);
    let (status, outputs, error) = match &result {
        Ok(outputs) => ("ok", outputs.clone(), None),
        Err(e) => ("error", Vec::new(), Some(e.clone())),
    };
    let manifest = RunManifest {
        subcommand: cli.command.name().to_string(),
        params: serde_json::to_value(&cli.command).expect("arguments serialize"),
        inputs: cli
            .command
            .inputs()
            .into_iter()
            .map(manifest::InputDigest::of)
            .collect(),
        version: VERSION,
        duration_seconds: start.elapsed().as_secs_f64(),
        status,
        outputs,
        error,
    };
    let path = cli
        .manifest
        .clone()
        .unwrap_or_else(|| manifest::default_path(cli.command.primary_output()));
    if let Err(e) = manifest.write(&path) {
        let _ = writeln!(stderr, "{e}");
    }
    match result {
        Ok(_) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

/// Runs one subcommand and returns the files it wrote.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Inject(a) => cmd_inject(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::ProbeNormality(a) => cmd_probe(a, stdout),
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn load(path: &Path, schema: Option<&str>) -> Result<Dataset, CliError> {
    let schema = schema.map(CsvSchema::parse_mapping).transpose()?;
    Ok(read_csv(path, schema.as_ref())?)
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load_model(path: &Path) -> Result<GaussianClassModel, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(GaussianClassModel::from_json(&text)?)
}

/// One value per feature, or a single value for all of them.
fn per_feature(flag: &str, values: &[f64], n: usize) -> Result<Vec<f64>, CliError> {
    match values.len() {
        1 => Ok(vec![values[0]; n]),
        len if len == n => Ok(values.to_vec()),
        len => Err(CliError::usage(
            "BadSpec",
            format!("--{flag} has {len} values for {n} features"),
        )),
    }
}

pub fn cmd_generate(a: &args::GenerateArgs) -> Result<Vec<PathBuf>, CliError> {
    let n = a.features.len();
    let mu = per_feature("normal-mu", &a.normal_mu, n)?;
    let sigma = per_feature("normal-sigma", &a.normal_sigma, n)?;
    let faulty = if a.faulty_mu.is_empty() && a.faulty_sigma.is_empty() {
        if a.n_faulty > 0 {
            return Err(CliError::usage(
                "BadSpec",
                "--n-faulty needs --faulty-mu and --faulty-sigma",
            ));
        }
        vec![None; n]
    } else {
        let fm = per_feature("faulty-mu", &a.faulty_mu, n)?;
        let fs = per_feature("faulty-sigma", &a.faulty_sigma, n)?;
        fm.into_iter()
            .zip(fs)
            .map(|(m, s)| Some(GaussianParams::new(m, s)))
            .collect()
    };
    let spec = SyntheticSpec {
        features: a
            .features
            .iter()
            .zip(mu.into_iter().zip(sigma))
            .zip(faulty)
            .map(|((name, (m, s)), faulty)| SyntheticFeature {
                name: name.clone(),
                normal: GaussianParams::new(m, s),
                faulty,
            })
            .collect(),
        n_faulty: a.n_faulty,
    };
    let ds = generate_synthetic(&spec, a.n, a.seed)?;
    write_csv(&ds, &a.out)?;
    Ok(vec![a.out.clone()])
}

/// Assembles a fault plan from the shared flags.
pub fn fault_spec(kind: FaultKind, rate: f64, beta: f64, p: &args::FaultParams) -> FaultSpec {
    let mut spec = FaultSpec {
        alpha: p.alpha,
        beta,
        noise_std: p.eta_std,
        ..FaultSpec::new(kind, rate, p.seed)
    };
    if let (Some(lo), Some(hi)) = (p.gamma1, p.gamma2) {
        spec = spec.with_bounds(Bounds::new(lo, hi));
    }
    for fb in &p.feature_bounds {
        spec = spec.with_feature_bounds(fb.feature.clone(), fb.bounds);
    }
    if !p.targets.is_empty() {
        spec = spec.with_targets(p.targets.iter().cloned());
    }
    spec
}

pub fn cmd_inject(a: &args::InjectArgs) -> Result<Vec<PathBuf>, CliError> {
    let spec = fault_spec(a.fault, a.rate, a.beta, &a.params);
    spec.validate()?;
    let clean = load(&a.input, a.schema.as_deref())?;
    let (faulted, report) = apply_fault_plan(&clean, &spec)?;
    write_csv(&faulted, &a.out)?;
    let report_path = a
        .report
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".report.json"));
    write_text(&report_path, &(report.to_json() + "\n"))?;
    Ok(vec![a.out.clone(), report_path])
}

pub fn cmd_fit(a: &args::FitArgs) -> Result<Vec<PathBuf>, CliError> {
    let data = load(&a.train, a.schema.as_deref())?;
    let features: Vec<String> = if a.features.is_empty() {
        data.schema().to_vec()
    } else {
        a.features.clone()
    };
    let mut outputs = vec![a.out.clone()];
    let train = if a.no_split {
        data
    } else {
        let (train, test) = if a.no_shuffle {
            split_chronological(&data, a.split_fraction)?
        } else {
            split(&data, a.split_fraction, a.split_seed)?
        };
        let test_path = a
            .test_out
            .clone()
            .unwrap_or_else(|| with_suffix(&a.out, ".test.csv"));
        write_csv(&test, &test_path)?;
        outputs.push(test_path);
        train
    };
    let model = fit(&train, &features)?;
    write_text(&a.out, &(model.to_json() + "\n"))?;
    Ok(outputs)
}

pub fn cmd_classify(a: &args::ClassifyArgs) -> Result<Vec<PathBuf>, CliError> {
    let model = load_model(&a.model)?;
    let data = load(&a.input, a.schema.as_deref())?;
    let ev = classify_dataset(&model, &data)?;
    ev.write_csv_to(create(&a.out)?)
        .map_err(|e| CliError::io(&a.out, e))?;
    Ok(vec![a.out.clone()])
}

#[derive(Debug, Serialize)]
struct EvaluationReport {
    records: usize,
    #[serde(flatten)]
    metrics: MetricsReport,
    auc: Option<f64>,
}

pub fn cmd_evaluate(
    a: &args::EvaluateArgs,
    stdout: &mut dyn Write,
) -> Result<Vec<PathBuf>, CliError> {
    let model = load_model(&a.model)?;
    let test = load(&a.test, a.schema.as_deref())?;
    let ev = evaluate(&model, &test)?;
    let metrics = ev.metrics()?;
    let roc = match ev.roc() {
        Ok(r) => Some(r),
        Err(dste_core::DetectorError::Metrics(dste_core::MetricsError::OneClassOnly)) => None,
        Err(e) => return Err(e.into()),
    };
    let report = EvaluationReport {
        records: test.len(),
        metrics,
        auc: roc.as_ref().map(|r| r.auc()),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    write_text(&a.out_report, &(text + "\n"))?;
    let mut outputs = vec![a.out_report.clone()];
    if let Some(path) = &a.out_roc {
        match &roc {
            Some(r) => r
                .write_csv_to(create(path)?)
                .map_err(|e| CliError::io(path, e))?,
            None => {
                return Err(CliError::data(
                    "OneClassOnly",
                    "test set has a single class, no ROC curve",
                ))
            }
        }
        outputs.push(path.clone());
    }
    let auc = report
        .auc
        .map(dataset::format_value)
        .unwrap_or_else(|| "undefined".into());
    let _ = writeln!(stdout, "{metrics}\nauc          {auc}");
    Ok(outputs)
}

pub fn cmd_sweep(a: &args::SweepArgs, stdout: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let config = sweep::SweepConfig {
        faults: a.faults.clone(),
        rates: a.rates.clone(),
        betas: a.betas.clone(),
        template: fault_spec(FaultKind::Gain, 0.1, 1.0, &a.params),
        split_fraction: a.split_fraction,
    };
    let clean = load(&a.input, a.schema.as_deref())?;
    let rows = sweep::run_sweep(&clean, &config)?;
    sweep::write_rows(&rows, create(&a.out)?).map_err(|e| CliError::io(&a.out, e))?;
    let _ = writeln!(
        stdout,
        "{} cells written to {}",
        rows.len(),
        a.out.display()
    );
    Ok(vec![a.out.clone()])
}

pub fn cmd_probe(a: &args::ProbeArgs, stdout: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let data = load(&a.input, a.schema.as_deref())?;
    let plot = normality_probe(&data, &a.feature)?;
    plot.write_csv_to(create(&a.out)?)?;
    let _ = writeln!(
        stdout,
        "feature {}: n={} r_squared={}",
        plot.feature,
        plot.points.len(),
        dataset::format_value(plot.r_squared)
    );
    Ok(vec![a.out.clone()])
}
