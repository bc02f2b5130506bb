use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    /// Hex SHA-256 of the file; `None` when the file could not be read.
    pub sha256: Option<String>,
}

impl InputDigest {
    pub fn of(path: &Path) -> Self {
        InputDigest {
            path: path.to_path_buf(),
            sha256: fs::read(path)
                .ok()
                .map(|bytes| hex::encode(Sha256::digest(bytes))),
        }
    }
}

/// Reproducibility record written next to every run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub version: &'static str,
    pub duration_seconds: f64,
    pub status: &'static str,
    pub outputs: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<CliError>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}

/// `<path>.manifest.json`, keeping the full original file name.
pub fn default_path(primary_output: &Path) -> PathBuf {
    let mut name = primary_output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
