//! JSON run records and their atomic persistence.
//!
//! Everything except `timing` is a deterministic function of the config
//! echo, so two runs of the same config produce identical payloads.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use mskrylov::complexity::{EnsembleStats, PlateauResult};
use mskrylov::models::ModelSpec;
use mskrylov::seeds::SeedKind;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Variant};
use crate::error::{CliError, CliResult};

pub const RUN_SCHEMA: &str = "mskrylov-run/1";
pub const PAIR_SCHEMA: &str = "mskrylov-pair/1";
pub const ERROR_SCHEMA: &str = "mskrylov-error/1";
pub const DEFAULT_OUTPUT_DIR: &str = "runs";
pub const BAR_CONVENTION: &str = "integrable = white bar, chaotic = black bar";

pub fn software_version() -> String {
    format!("mskrylov {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    /// `None` for size runs, whose simple set comes from the graded basis.
    pub kind: Option<SeedKind>,
    pub requested: usize,
    pub retained: usize,
    pub deflated: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub window: f64,
    pub samples: usize,
    pub value: f64,
    /// `|oracle - plateau| / plateau`, or the absolute difference for a zero plateau.
    pub relative_error: f64,
}

impl OracleCheck {
    pub fn new(window: f64, samples: usize, value: f64, plateau: f64) -> Self {
        let diff = (value - plateau).abs();
        Self {
            window,
            samples,
            value,
            relative_error: if plateau > 0.0 { diff / plateau } else { diff },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub rng_seed: Option<u64>,
    pub result: PlateauResult,
    pub seeds: SeedSummary,
    pub oracle: Option<OracleCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Mean plateau over realizations.
    pub value: f64,
    /// Largest `M` over realizations.
    pub levels: usize,
    /// `value / (levels - 1)`.
    pub normalized: f64,
    /// Raw plateau statistics over realizations.
    pub stats: EnsembleStats,
}

impl RunSummary {
    pub fn from_realizations(realizations: &[Realization]) -> CliResult<Self> {
        let values: Vec<f64> = realizations.iter().map(|r| r.result.value).collect();
        let stats = EnsembleStats::from_values(&values)?;
        let levels = realizations
            .iter()
            .map(|r| r.result.levels)
            .max()
            .unwrap_or(1);
        Ok(Self {
            value: stats.mean,
            levels,
            normalized: if levels > 1 {
                stats.mean / (levels - 1) as f64
            } else {
                0.0
            },
            stats,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix: u64,
    pub seconds: f64,
    pub realization_seconds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub software_version: String,
    pub config: RunConfig,
    /// Model of realization 0.
    pub model: ModelSpec,
    pub summary: Option<RunSummary>,
    pub realizations: Vec<Realization>,
    pub timing: Timing,
}

impl RunRecord {
    pub fn new(config: &RunConfig, model: ModelSpec) -> Self {
        Self {
            schema: RUN_SCHEMA.to_string(),
            software_version: software_version(),
            config: config.clone(),
            model,
            summary: None,
            realizations: Vec::new(),
            timing: Timing {
                started_unix: now(),
                ..Timing::default()
            },
        }
    }

    pub fn seeds_kind(&self) -> Option<SeedKind> {
        self.realizations.first().and_then(|r| r.seeds.kind)
    }

    /// The record without wall-clock fields.
    pub fn payload(&self) -> Self {
        Self {
            timing: Timing::default(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub schema: String,
    pub software_version: String,
    pub tag: Option<String>,
    pub family: String,
    pub size: usize,
    pub variant: Variant,
    pub seed_kind: Option<SeedKind>,
    /// `max(M_int, M_cha) - 1`.
    pub denominator: usize,
    pub normalized_integrable: f64,
    /// Statistics of the per-realization normalized chaotic plateaus.
    pub normalized_chaotic: EnsembleStats,
    pub integrable_lower: bool,
    /// Integrable below the chaotic mean minus one standard error.
    pub integrable_lower_by_sem: bool,
    pub bars: String,
    pub integrable: RunRecord,
    pub chaotic: RunRecord,
}

impl PairRecord {
    pub fn integrable_preset(&self) -> Option<String> {
        match &self.integrable.config.model {
            crate::config::ModelConfig::Preset(p) => Some(p.preset.clone()),
            crate::config::ModelConfig::Explicit(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub schema: String,
    pub software_version: String,
    pub command: String,
    pub config: Option<RunConfig>,
    pub error: String,
    pub started_unix: u64,
}

impl ErrorRecord {
    pub fn new(command: &str, config: Option<RunConfig>, error: &dyn std::fmt::Display) -> Self {
        Self {
            schema: ERROR_SCHEMA.to_string(),
            software_version: software_version(),
            command: command.to_string(),
            config,
            error: error.to_string(),
            started_unix: now(),
        }
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Writes `bytes` to a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
