//! Grid of inject → split → fit → evaluate runs.

use std::io::Write;

use dste_core::dataset::{format_value, split, Dataset};
use dste_core::fault::{apply_fault_plan, FaultKind, FaultSpec};
use dste_core::{evaluate, fit};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;

/// Everything but the grid axes is shared by all cells.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub faults: Vec<FaultKind>,
    pub rates: Vec<f64>,
    pub betas: Vec<f64>,
    /// Template for each cell; `kind`, `rate` and `beta` are overwritten.
    pub template: FaultSpec,
    pub split_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub fault: FaultKind,
    pub rate: f64,
    pub beta: f64,
    pub accuracy: f64,
    pub fpr: Option<f64>,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub auc: Option<f64>,
}

pub const HEADER: [&str; 9] = [
    "fault",
    "rate",
    "beta",
    "accuracy",
    "fpr",
    "precision",
    "sensitivity",
    "specificity",
    "auc",
];

/// Runs one grid cell. The template seed drives both the injection and the
/// split; the two draw from separate generator streams.
pub fn run_cell(
    clean: &Dataset,
    template: &FaultSpec,
    split_fraction: f64,
) -> Result<SweepRow, CliError> {
    let (faulted, _) = apply_fault_plan(clean, template)?;
    let (train, test) = split(&faulted, split_fraction, template.seed)?;
    let model = fit(&train, clean.schema())?;
    let ev = evaluate(&model, &test)?;
    let m = ev.metrics()?;
    // one-class test sets have no ROC
    let auc = ev.roc().ok().map(|r| r.auc());
    Ok(SweepRow {
        fault: template.kind,
        rate: template.rate,
        beta: template.beta,
        accuracy: m.accuracy,
        fpr: m.fpr,
        precision: m.precision,
        sensitivity: m.sensitivity,
        specificity: m.specificity,
        auc,
    })
}

/// Cells run in parallel; rows come back sorted by (fault name, rate, beta).
pub fn run_sweep(clean: &Dataset, config: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    let mut cells = Vec::new();
    for &kind in &config.faults {
        for &rate in &config.rates {
            for &beta in &config.betas {
                cells.push(FaultSpec {
                    kind,
                    rate,
                    beta,
                    ..config.template.clone()
                });
            }
        }
    }
    // reject bad parameters before spending time on the grid
    for c in &cells {
        c.validate()?;
    }
    let mut rows = cells
        .par_iter()
        .map(|spec| run_cell(clean, spec, config.split_fraction))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| {
        a.fault
            .name()
            .cmp(b.fault.name())
            .then(a.rate.total_cmp(&b.rate))
            .then(a.beta.total_cmp(&b.beta))
    });
    Ok(rows)
}

pub fn write_rows<W: Write>(rows: &[SweepRow], writer: W) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(writer);
    let opt = |v: Option<f64>| v.map(format_value).unwrap_or_default();
    writeln!(w, "{}", HEADER.join(","))?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.fault.name(),
            format_value(r.rate),
            format_value(r.beta),
            format_value(r.accuracy),
            opt(r.fpr),
            opt(r.precision),
            opt(r.sensitivity),
            opt(r.specificity),
            opt(r.auc),
        )?;
    }
    w.flush()
}
