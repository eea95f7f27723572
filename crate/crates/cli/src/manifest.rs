use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use advreg_core::SweepConfig;
use serde::{Deserialize, Serialize};

/// Resolved configuration of a run. Replaying `run` reproduces the CSVs
/// byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub run: Run,
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Run {
    Sweep {
        config: SweepConfig,
        svg: bool,
    },
    AlphaStudy {
        s_list: Vec<f64>,
        template: SweepConfig,
        svg: bool,
    },
}

impl RunManifest {
    pub fn new(run: Run, outputs: Vec<PathBuf>) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            run,
            outputs,
        }
    }
}
