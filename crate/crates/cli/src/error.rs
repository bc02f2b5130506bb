use std::fmt;
use std::path::Path;

use dste_core::dataset::DatasetError;
use dste_core::detector::DetectorError;
use dste_core::fault::FaultError;
use dste_core::gaussian::ModelError;
use dste_core::metrics::MetricsError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorClass {
    Usage,
    Data,
    Numeric,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 2,
            ErrorClass::Data => 3,
            ErrorClass::Numeric => 4,
        }
    }
}

/// Failure of one subcommand; `code` is the structured name printed on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub class: ErrorClass,
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            class: ErrorClass::Usage,
            code,
            message: message.into(),
        }
    }

    pub fn data(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            class: ErrorClass::Data,
            code,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::data("IoFailure", format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        self.class.exit_code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        let class = match e {
            DatasetError::BadFraction(_)
            | DatasetError::BadSchema(_)
            | DatasetError::BadSpec(_)
            | DatasetError::UnknownFeature(_) => ErrorClass::Usage,
            _ => ErrorClass::Data,
        };
        CliError {
            class,
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let class = match e {
            ModelError::UnknownFeature(_)
            | ModelError::DuplicateFeature(_)
            | ModelError::NoFeatures => ErrorClass::Usage,
            ModelError::NonFiniteValue { .. } => ErrorClass::Numeric,
            _ => ErrorClass::Data,
        };
        CliError {
            class,
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl From<FaultError> for CliError {
    fn from(e: FaultError) -> Self {
        let class = match e {
            FaultError::EmptyDataset | FaultError::MissingInput { .. } => ErrorClass::Data,
            _ => ErrorClass::Usage,
        };
        CliError {
            class,
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        let class = match e {
            MetricsError::InvalidScore { .. } => ErrorClass::Numeric,
            _ => ErrorClass::Data,
        };
        CliError {
            class,
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl From<DetectorError> for CliError {
    fn from(e: DetectorError) -> Self {
        match e {
            DetectorError::Model(m) => m.into(),
            DetectorError::Metrics(m) => m.into(),
            DetectorError::Dst(_) | DetectorError::Degenerate(_) => CliError {
                class: ErrorClass::Numeric,
                code: e.code(),
                message: e.to_string(),
            },
            _ => CliError::data(e.code(), e.to_string()),
        }
    }
}
