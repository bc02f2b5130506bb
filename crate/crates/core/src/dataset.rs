//! Timestamped sensor records, CSV ingest/emit, train/test splitting,
//! synthetic data generation and the probability-plot normality probe.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::gaussian::ClassLabel;
use crate::rng;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("line {line}, column `{column}`: cannot parse `{value}`")]
    MalformedRow {
        line: u64,
        column: String,
        value: String,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: label `{value}` is not 0 or 1")]
    BadLabel { line: u64, value: String },
    #[error("bad schema mapping: {0}")]
    BadSchema(String),
    #[error("record {index} does not match the dataset layout: {reason}")]
    LayoutMismatch { index: usize, reason: String },
    #[error("dataset has {0} records, not enough for this operation")]
    EmptyDataset(usize),
    #[error("train fraction {0} is not in (0, 1)")]
    BadFraction(f64),
    #[error("dataset is not labeled")]
    Unlabeled,
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("invalid synthetic spec: {0}")]
    BadSpec(String),
    #[error("feature `{feature}` has insufficient data for a probability plot: {reason}")]
    InsufficientData { feature: String, reason: String },
}

impl DatasetError {
    pub fn code(&self) -> &'static str {
        match self {
            DatasetError::Io { .. } => "IoFailure",
            DatasetError::Csv { .. } => "MalformedRow",
            DatasetError::MalformedRow { .. } => "MalformedRow",
            DatasetError::MissingColumn(_) => "MissingColumn",
            DatasetError::BadLabel { .. } => "BadLabel",
            DatasetError::BadSchema(_) => "BadSchema",
            DatasetError::LayoutMismatch { .. } => "LayoutMismatch",
            DatasetError::EmptyDataset(_) => "EmptyDataset",
            DatasetError::BadFraction(_) => "BadFraction",
            DatasetError::Unlabeled => "Unlabeled",
            DatasetError::UnknownFeature(_) => "UnknownFeature",
            DatasetError::BadSpec(_) => "BadSpec",
            DatasetError::InsufficientData { .. } => "InsufficientData",
        }
    }
}

/// Record time: either a monotone tick counter or an RFC 3339 instant kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Timestamp {
    Tick(i64),
    Instant(String),
}

impl Timestamp {
    pub fn parse(text: &str) -> Option<Timestamp> {
        if let Ok(t) = text.parse::<i64>() {
            return Some(Timestamp::Tick(t));
        }
        chrono::DateTime::parse_from_rfc3339(text)
            .ok()
            .map(|_| Timestamp::Instant(text.to_string()))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timestamp::Tick(t) => write!(f, "{t}"),
            Timestamp::Instant(s) => f.write_str(s),
        }
    }
}

/// One reading of node `n` at time `t`. `values` is parallel to the dataset schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub node_id: Option<String>,
    pub timestamp: Option<Timestamp>,
    pub values: Vec<Option<f64>>,
    pub label: Option<ClassLabel>,
}

impl Record {
    pub fn new(values: Vec<Option<f64>>) -> Self {
        Record {
            node_id: None,
            timestamp: None,
            values,
            label: None,
        }
    }

    pub fn with_label(mut self, label: ClassLabel) -> Self {
        self.label = Some(label);
        self
    }
}

/// Which optional columns a dataset carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Layout {
    pub node_id: bool,
    pub timestamp: bool,
    pub labeled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<String>,
    layout: Layout,
    records: Vec<Record>,
}

impl Dataset {
    pub fn new(
        schema: Vec<String>,
        layout: Layout,
        records: Vec<Record>,
    ) -> Result<Self, DatasetError> {
        for (i, f) in schema.iter().enumerate() {
            if schema[..i].contains(f) {
                return Err(DatasetError::BadSchema(format!("duplicate feature `{f}`")));
            }
        }
        let ds = Dataset {
            schema,
            layout,
            records: Vec::new(),
        };
        for (index, r) in records.iter().enumerate() {
            ds.check_record(index, r)?;
        }
        Ok(Dataset { records, ..ds })
    }

    fn check_record(&self, index: usize, r: &Record) -> Result<(), DatasetError> {
        let mismatch = |reason: String| DatasetError::LayoutMismatch { index, reason };
        if r.values.len() != self.schema.len() {
            return Err(mismatch(format!(
                "{} values for {} features",
                r.values.len(),
                self.schema.len()
            )));
        }
        if r.label.is_some() != self.layout.labeled {
            return Err(mismatch("label presence differs from dataset".into()));
        }
        if r.node_id.is_some() && !self.layout.node_id {
            return Err(mismatch("node id without node id column".into()));
        }
        if r.timestamp.is_some() && !self.layout.timestamp {
            return Err(mismatch("timestamp without timestamp column".into()));
        }
        Ok(())
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn is_labeled(&self) -> bool {
        self.layout.labeled
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn feature_index(&self, feature: &str) -> Result<usize, DatasetError> {
        self.schema
            .iter()
            .position(|f| f == feature)
            .ok_or_else(|| DatasetError::UnknownFeature(feature.to_string()))
    }

    /// Values of one feature in record order.
    pub fn column(&self, feature: &str) -> Result<Vec<Option<f64>>, DatasetError> {
        let j = self.feature_index(feature)?;
        Ok(self.records.iter().map(|r| r.values[j]).collect())
    }

    pub fn labels(&self) -> Result<Vec<ClassLabel>, DatasetError> {
        if !self.layout.labeled {
            return Err(DatasetError::Unlabeled);
        }
        Ok(self.records.iter().filter_map(|r| r.label).collect())
    }

    /// Same schema and layout, different records.
    pub fn with_records(&self, records: Vec<Record>) -> Result<Dataset, DatasetError> {
        Dataset::new(self.schema.clone(), self.layout, records)
    }

    /// Labels every record; records without a label get `default`.
    pub fn into_labeled(self, default: ClassLabel) -> Dataset {
        let records = self
            .records
            .into_iter()
            .map(|mut r| {
                r.label.get_or_insert(default);
                r
            })
            .collect();
        Dataset {
            schema: self.schema,
            layout: Layout {
                labeled: true,
                ..self.layout
            },
            records,
        }
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }
}

/// Maps dataset roles onto CSV header names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CsvSchema {
    /// `(feature name, column header)` in schema order.
    pub features: Vec<(String, String)>,
    pub label: Option<String>,
    pub timestamp: Option<String>,
    pub node_id: Option<String>,
}

const NODE_COLUMNS: &[&str] = &["node_id", "node"];
const TIMESTAMP_COLUMNS: &[&str] = &["timestamp", "ts", "time"];
const LABEL_COLUMNS: &[&str] = &["label"];

impl CsvSchema {
    /// Recognizes `node_id`/`node`, `timestamp`/`ts`/`time` and `label`;
    /// every other column is a feature of the same name.
    pub fn infer<S: AsRef<str>>(header: &[S]) -> CsvSchema {
        let mut schema = CsvSchema::default();
        for h in header {
            let h = h.as_ref();
            let lower = h.to_ascii_lowercase();
            if schema.node_id.is_none() && NODE_COLUMNS.contains(&lower.as_str()) {
                schema.node_id = Some(h.to_string());
            } else if schema.timestamp.is_none() && TIMESTAMP_COLUMNS.contains(&lower.as_str()) {
                schema.timestamp = Some(h.to_string());
            } else if schema.label.is_none() && LABEL_COLUMNS.contains(&lower.as_str()) {
                schema.label = Some(h.to_string());
            } else {
                schema.features.push((h.to_string(), h.to_string()));
            }
        }
        schema
    }

    /// Parses `role=column` pairs separated by commas. Roles `label`,
    /// `timestamp` and `node_id` are reserved; anything else names a feature.
    ///
    /// `temperature=temp_c,humidity=rh,label=anomaly,timestamp=epoch`
    pub fn parse_mapping(mapping: &str) -> Result<CsvSchema, DatasetError> {
        let mut schema = CsvSchema::default();
        for part in mapping.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (role, column) = part
                .split_once('=')
                .map(|(r, c)| (r.trim(), c.trim()))
                .filter(|(r, c)| !r.is_empty() && !c.is_empty())
                .ok_or_else(|| {
                    DatasetError::BadSchema(format!("expected role=column, got `{part}`"))
                })?;
            let slot = match role {
                "label" => &mut schema.label,
                "timestamp" => &mut schema.timestamp,
                "node_id" => &mut schema.node_id,
                feature => {
                    if schema.features.iter().any(|(f, _)| f == feature) {
                        return Err(DatasetError::BadSchema(format!(
                            "feature `{feature}` mapped twice"
                        )));
                    }
                    schema
                        .features
                        .push((feature.to_string(), column.to_string()));
                    continue;
                }
            };
            if slot.replace(column.to_string()).is_some() {
                return Err(DatasetError::BadSchema(format!(
                    "role `{role}` mapped twice"
                )));
            }
        }
        if schema.features.is_empty() {
            return Err(DatasetError::BadSchema("no feature columns mapped".into()));
        }
        Ok(schema)
    }
}

fn column_position(header: &csv::StringRecord, name: &str) -> Result<usize, DatasetError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
}

fn csv_error(e: csv::Error) -> DatasetError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    DatasetError::Csv {
        line,
        message: e.to_string(),
    }
}

fn parse_value(cell: &str) -> Result<Option<f64>, ()> {
    let cell = cell.trim();
    if cell.is_empty() || cell == "NaN" {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_nan() => Ok(None),
        Ok(v) => Ok(Some(v)),
        Err(_) => Err(()),
    }
}

/// Reads a comma-delimited file with a header row. With no schema the
/// columns are inferred by [`CsvSchema::infer`].
pub fn read_csv(
    path: impl AsRef<Path>,
    schema: Option<&CsvSchema>,
) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv_from(file, schema)
}

pub fn read_csv_from<R: Read>(
    reader: R,
    schema: Option<&CsvSchema>,
) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let inferred;
    let schema = match schema {
        Some(s) => s,
        None => {
            inferred = CsvSchema::infer(&header.iter().collect::<Vec<_>>());
            &inferred
        }
    };

    let feature_cols = schema
        .features
        .iter()
        .map(|(_, col)| column_position(&header, col))
        .collect::<Result<Vec<_>, _>>()?;
    let label_col = schema
        .label
        .as_deref()
        .map(|c| column_position(&header, c))
        .transpose()?;
    let ts_col = schema
        .timestamp
        .as_deref()
        .map(|c| column_position(&header, c))
        .transpose()?;
    let node_col = schema
        .node_id
        .as_deref()
        .map(|c| column_position(&header, c))
        .transpose()?;

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let cell = |i: usize| row.get(i).unwrap_or("");

        let mut values = Vec::with_capacity(feature_cols.len());
        for (&col, (_, name)) in feature_cols.iter().zip(&schema.features) {
            let v = parse_value(cell(col)).map_err(|_| DatasetError::MalformedRow {
                line,
                column: name.clone(),
                value: cell(col).to_string(),
            })?;
            values.push(v);
        }
        let label = match label_col {
            Some(c) => Some(match cell(c).trim() {
                "0" => ClassLabel::Normal,
                "1" => ClassLabel::Faulty,
                other => {
                    return Err(DatasetError::BadLabel {
                        line,
                        value: other.to_string(),
                    })
                }
            }),
            None => None,
        };
        let timestamp = match ts_col {
            Some(c) if !cell(c).trim().is_empty() => {
                let text = cell(c).trim();
                Some(
                    Timestamp::parse(text).ok_or_else(|| DatasetError::MalformedRow {
                        line,
                        column: header[c].to_string(),
                        value: text.to_string(),
                    })?,
                )
            }
            _ => None,
        };
        let node_id = node_col
            .map(|c| cell(c).trim().to_string())
            .filter(|s| !s.is_empty());
        records.push(Record {
            node_id,
            timestamp,
            values,
            label,
        });
    }

    let layout = Layout {
        node_id: node_col.is_some(),
        timestamp: ts_col.is_some(),
        labeled: label_col.is_some(),
    };
    Dataset::new(
        schema.features.iter().map(|(f, _)| f.clone()).collect(),
        layout,
        records,
    )
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let io_err = |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    write_csv_to(dataset, &mut file)?;
    file.flush().map_err(io_err)
}

pub fn write_csv_to<W: Write>(dataset: &Dataset, writer: W) -> Result<(), DatasetError> {
    let mut wtr = csv::WriterBuilder::new().from_writer(writer);
    let layout = dataset.layout;
    let mut header: Vec<&str> = Vec::new();
    if layout.node_id {
        header.push("node_id");
    }
    if layout.timestamp {
        header.push("timestamp");
    }
    header.extend(dataset.schema.iter().map(String::as_str));
    if layout.labeled {
        header.push("label");
    }
    wtr.write_record(&header).map_err(csv_error)?;

    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for r in &dataset.records {
        row.clear();
        if layout.node_id {
            row.push(r.node_id.clone().unwrap_or_default());
        }
        if layout.timestamp {
            row.push(
                r.timestamp
                    .as_ref()
                    .map(ToString::to_string)
                    .unwrap_or_default(),
            );
        }
        row.extend(
            r.values
                .iter()
                .map(|v| v.map(format_value).unwrap_or_default()),
        );
        if layout.labeled {
            row.push(r.label.map(|l| l.code().to_string()).unwrap_or_default());
        }
        wtr.write_record(&row).map_err(csv_error)?;
    }
    wtr.flush().map_err(|e| DatasetError::Csv {
        line: 0,
        message: e.to_string(),
    })
}

/// Seeded shuffle then prefix cut at `round(train_fraction * N)`.
pub fn split(
    dataset: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), DatasetError> {
    split_with(dataset, train_fraction, Some(seed))
}

/// Prefix cut in file order, for time-ordered protocols.
pub fn split_chronological(
    dataset: &Dataset,
    train_fraction: f64,
) -> Result<(Dataset, Dataset), DatasetError> {
    split_with(dataset, train_fraction, None)
}

fn split_with(
    dataset: &Dataset,
    train_fraction: f64,
    seed: Option<u64>,
) -> Result<(Dataset, Dataset), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::BadFraction(train_fraction));
    }
    if dataset.len() < 2 {
        return Err(DatasetError::EmptyDataset(dataset.len()));
    }
    if !dataset.is_labeled() {
        return Err(DatasetError::Unlabeled);
    }
    let n = dataset.len();
    let order = match seed {
        Some(seed) => rng::permutation(n, &mut rng::stream(seed, rng::Stream::Split)),
        None => (0..n).collect(),
    };
    let cut = (train_fraction * n as f64).round() as usize;
    let pick = |idx: &[usize]| {
        idx.iter()
            .map(|&i| dataset.records[i].clone())
            .collect::<Vec<_>>()
    };
    Ok((
        dataset.with_records(pick(&order[..cut]))?,
        dataset.with_records(pick(&order[cut..]))?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mean: f64,
    pub std_dev: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, std_dev: f64) -> Self {
        GaussianParams { mean, std_dev }
    }

    fn validate(&self, what: &str) -> Result<(), DatasetError> {
        if !self.mean.is_finite() || !self.std_dev.is_finite() || self.std_dev <= 0.0 {
            return Err(DatasetError::BadSpec(format!(
                "{what}: need finite mean and positive std dev, got N({}, {})",
                self.mean, self.std_dev
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticFeature {
    pub name: String,
    pub normal: GaussianParams,
    /// Required when the spec asks for anomalous records.
    pub faulty: Option<GaussianParams>,
}

/// Per-class, per-feature Gaussian parameters for synthetic data.
///
/// `n_faulty` anomalous records (labeled faulty, drawn from the `faulty`
/// parameters) are interleaved with the normal ones at seeded positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub features: Vec<SyntheticFeature>,
    pub n_faulty: usize,
}

impl SyntheticSpec {
    pub fn normal_only(features: Vec<(String, GaussianParams)>) -> Self {
        SyntheticSpec {
            features: features
                .into_iter()
                .map(|(name, normal)| SyntheticFeature {
                    name,
                    normal,
                    faulty: None,
                })
                .collect(),
            n_faulty: 0,
        }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        if self.features.is_empty() {
            return Err(DatasetError::BadSpec("no features".into()));
        }
        for (i, f) in self.features.iter().enumerate() {
            if self.features[..i].iter().any(|g| g.name == f.name) {
                return Err(DatasetError::BadSpec(format!(
                    "duplicate feature `{}`",
                    f.name
                )));
            }
            f.normal.validate(&f.name)?;
            match (&f.faulty, self.n_faulty) {
                (Some(p), _) => p.validate(&f.name)?,
                (None, 0) => {}
                (None, _) => {
                    return Err(DatasetError::BadSpec(format!(
                        "feature `{}` has no faulty-class parameters",
                        f.name
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Draws `n_normal` normal records plus `spec.n_faulty` anomalies.
/// Timestamps are record ticks; every record is labeled.
pub fn generate_synthetic(
    spec: &SyntheticSpec,
    n_normal: usize,
    seed: u64,
) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    let n = n_normal + spec.n_faulty;
    let mut rng = rng::stream(seed, rng::Stream::Synthetic);
    let mut labels = vec![ClassLabel::Normal; n];
    labels[n_normal..].fill(ClassLabel::Faulty);
    rng::fisher_yates(&mut labels, &mut rng);

    let records = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let values = spec
                .features
                .iter()
                .map(|f| {
                    let p = match label {
                        ClassLabel::Normal => f.normal,
                        ClassLabel::Faulty => f.faulty.expect("validated"),
                    };
                    let z: f64 = StandardNormal.sample(&mut rng);
                    Some(p.mean + p.std_dev * z)
                })
                .collect();
            Record {
                node_id: None,
                timestamp: Some(Timestamp::Tick(i as i64)),
                values,
                label: Some(label),
            }
        })
        .collect();
    Dataset::new(
        spec.features.iter().map(|f| f.name.clone()).collect(),
        Layout {
            node_id: false,
            timestamp: true,
            labeled: true,
        },
        records,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub quantile: f64,
    pub value: f64,
}

/// Normal probability plot: ordered sample against standard-normal quantiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityPlot {
    pub feature: String,
    pub points: Vec<PlotPoint>,
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination of the least-squares line; 1 is perfectly straight.
    pub r_squared: f64,
}

impl ProbabilityPlot {
    pub fn write_csv_to<W: Write>(&self, writer: W) -> Result<(), DatasetError> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["quantile", "value"]).map_err(csv_error)?;
        for p in &self.points {
            wtr.write_record([format_value(p.quantile), format_value(p.value)])
                .map_err(csv_error)?;
        }
        wtr.flush().map_err(|e| DatasetError::Csv {
            line: 0,
            message: e.to_string(),
        })
    }
}

/// Standard-normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Pairs sorted sample values with quantiles at plotting positions
/// `(i - 0.5) / n` and fits a least-squares line through them.
pub fn normality_probe(dataset: &Dataset, feature: &str) -> Result<ProbabilityPlot, DatasetError> {
    let mut values: Vec<f64> = dataset.column(feature)?.into_iter().flatten().collect();
    let insufficient = |reason: String| DatasetError::InsufficientData {
        feature: feature.to_string(),
        reason,
    };
    if values.len() < 3 {
        return Err(insufficient(format!(
            "{} non-missing values, need 3",
            values.len()
        )));
    }
    values.sort_by(f64::total_cmp);
    if values[0] == values[values.len() - 1] {
        return Err(insufficient("sample is constant".into()));
    }
    let n = values.len() as f64;
    let points: Vec<PlotPoint> = values
        .iter()
        .enumerate()
        .map(|(i, &value)| PlotPoint {
            quantile: normal_quantile((i as f64 + 0.5) / n),
            value,
        })
        .collect();

    let mean_q = points.iter().map(|p| p.quantile).sum::<f64>() / n;
    let mean_v = points.iter().map(|p| p.value).sum::<f64>() / n;
    let (mut sqq, mut svv, mut sqv) = (0.0, 0.0, 0.0);
    for p in &points {
        let dq = p.quantile - mean_q;
        let dv = p.value - mean_v;
        sqq += dq * dq;
        svv += dv * dv;
        sqv += dq * dv;
    }
    if !svv.is_finite() {
        return Err(insufficient("sample variance is not finite".into()));
    }
    let slope = sqv / sqq;
    Ok(ProbabilityPlot {
        feature: feature.to_string(),
        intercept: mean_v - slope * mean_q,
        slope,
        r_squared: sqv * sqv / (sqq * svv),
        points,
    })
}
