//! Run configuration from a TOML file, overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

/// Every key a config file may set. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub descriptors: Option<Vec<String>>,
    pub metrics: Option<Vec<String>>,
    pub mode: Option<String>,
    pub manifest: Option<PathBuf>,
    pub ranks: Option<Vec<usize>>,
    pub cmc_max: Option<usize>,
    pub rank_rule: Option<String>,
    pub ltp_threshold: Option<u32>,
    pub lbp_histogram: Option<bool>,
    pub out_json: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub probes_per_subject: Option<usize>,
    pub repetitions: Option<usize>,
    pub warmup: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

/// Flag value if given, else config value.
pub fn pick<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}

/// Non-empty flag list if given, else config list.
pub fn pick_list<T>(flag: Vec<T>, config: Option<Vec<T>>) -> Option<Vec<T>> {
    if flag.is_empty() {
        config
    } else {
        Some(flag)
    }
}
