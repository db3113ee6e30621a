//! Run configuration, read from TOML.
//!
//! ```toml
//! pair_tag = "fig1-left-L4"
//!
//! [model]
//! preset = "ising-integrable"
//! size = 4
//!
//! [seeds]
//! variant = "operator"
//! family = "single-site-spins"
//!
//! [numerics]
//! precision_bits = 256
//!
//! [oracle]
//! enabled = true
//! ```
//!
//! A model may instead be given explicitly, e.g. `family = "xyz"` with
//! `sites`, `j_x`, `j_y`, `j_z` and `h_z`.

use std::path::{Path, PathBuf};

use mskrylov::krylov::ReorthPolicy;
use mskrylov::models::{ModelSpec, SpinConvention};
use mskrylov::seeds::SeedKind;
use mskrylov::Precision;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::presets::{self, Preset};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Operator,
    State,
    Size,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Operator => "operator",
            Variant::State => "state",
            Variant::Size => "size",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetModel {
    pub preset: String,
    /// `L` for chains, `N = M` for resonant systems.
    pub size: usize,
    #[serde(default)]
    pub spin_convention: SpinConvention,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelConfig {
    Preset(PresetModel),
    Explicit(ModelSpec),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    #[serde(default)]
    pub variant: Variant,
    /// Defaults by model and variant; must be absent for the size variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<SeedKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
    /// Absolute frequency clustering tolerance; `1e-8` of the spectral
    /// range of `L` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_tol: Option<f64>,
    #[serde(default)]
    pub policy: ReorthPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_levels: Option<usize>,
    /// Measure the orthogonality of the final basis, `O(N^2 D)`.
    #[serde(default)]
    pub measure_drift: bool,
}

fn default_bits() -> u32 {
    256
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            precision_bits: default_bits(),
            cluster_tol: None,
            policy: ReorthPolicy::default(),
            max_levels: None,
            measure_drift: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default)]
    pub enabled: bool,
    /// Averaging window `T`; `200 / (min gap)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    mskrylov::complexity::ORACLE_SAMPLES
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            window: None,
            samples: default_samples(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    /// Realization `r` uses `base_rng_seed + r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_rng_seed: Option<u64>,
}

fn default_count() -> usize {
    1
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            count: 1,
            base_rng_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub seeds: SeedConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Links the two halves of an integrable/chaotic comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_tag: Option<String>,
    /// Write the seed family and Krylov basis next to the record.
    #[serde(default)]
    pub checkpoint: bool,
}

/// Command-line overrides applied on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision_bits: Option<u32>,
    pub output_dir: Option<PathBuf>,
    pub rng_seed: Option<u64>,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }

    /// A preset run with every other setting at its default.
    pub fn preset(name: &str, size: usize, variant: Variant) -> Self {
        Self {
            model: ModelConfig::Preset(PresetModel {
                preset: name.to_string(),
                size,
                spin_convention: SpinConvention::default(),
            }),
            seeds: SeedConfig {
                variant,
                family: None,
            },
            numerics: Numerics::default(),
            oracle: OracleConfig::default(),
            ensemble: EnsembleConfig::default(),
            output_dir: None,
            pair_tag: None,
            checkpoint: false,
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(bits) = o.precision_bits {
            self.numerics.precision_bits = bits;
        }
        if let Some(dir) = &o.output_dir {
            self.output_dir = Some(dir.clone());
        }
        if let Some(seed) = o.rng_seed {
            self.ensemble.base_rng_seed = Some(seed);
        }
    }

    pub fn preset_entry(&self) -> CliResult<Option<&'static Preset>> {
        match &self.model {
            ModelConfig::Preset(p) => presets::find(&p.preset).map(Some),
            ModelConfig::Explicit(_) => Ok(None),
        }
    }

    pub fn base_rng_seed(&self) -> u64 {
        match (&self.ensemble.base_rng_seed, &self.model) {
            (Some(seed), _) => *seed,
            (None, ModelConfig::Explicit(ModelSpec::Qrs { rng_seed, .. })) => *rng_seed,
            _ => 0,
        }
    }

    /// The model of realization `r`.
    pub fn model_spec(&self, realization: usize) -> CliResult<ModelSpec> {
        let seed = self.base_rng_seed() + realization as u64;
        Ok(match &self.model {
            ModelConfig::Preset(p) => {
                presets::find(&p.preset)?.model(p.size, p.spin_convention, seed)
            }
            ModelConfig::Explicit(spec) => spec.with_rng_seed(seed),
        })
    }

    pub fn precision(&self) -> CliResult<Precision> {
        Ok(Precision::new(self.numerics.precision_bits)?)
    }

    /// Seed family after defaults; `None` for the size variant.
    pub fn seed_kind(&self) -> CliResult<Option<SeedKind>> {
        let chain = self.model_spec(0)?.is_chain();
        match (self.seeds.variant, self.seeds.family) {
            (Variant::Size, None) => Ok(None),
            (Variant::Size, Some(_)) => Err(CliError::Config(
                "the size variant uses the graded basis; drop `seeds.family`".into(),
            )),
            (Variant::State, None | Some(SeedKind::ProductStates)) if chain => {
                Ok(Some(SeedKind::ProductStates))
            }
            (Variant::State, _) => Err(CliError::Config(
                "the state variant needs a chain with product-state seeds".into(),
            )),
            (Variant::Operator, None) => Ok(Some(if chain {
                SeedKind::SingleSiteSpins
            } else {
                SeedKind::ZeroBody
            })),
            (Variant::Operator, Some(SeedKind::SingleSiteSpins)) if chain => {
                Ok(Some(SeedKind::SingleSiteSpins))
            }
            (Variant::Operator, Some(k @ (SeedKind::ZeroBody | SeedKind::NumberOperators)))
                if !chain =>
            {
                Ok(Some(k))
            }
            (Variant::Operator, Some(k)) => Err(CliError::Config(format!(
                "seed family {k:?} does not apply to this model and variant"
            ))),
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self, long_run: bool) -> CliResult<()> {
        self.preset_entry()?;
        self.precision()?;
        self.seed_kind()?;
        if self.ensemble.count == 0 {
            return Err(CliError::Config("ensemble count must be at least 1".into()));
        }
        let model = self.model_spec(0)?;
        let random = matches!(
            model,
            ModelSpec::Qrs {
                coupling: mskrylov::models::QrsCoupling::Chaotic,
                ..
            }
        );
        if self.ensemble.count > 1 && !random {
            return Err(CliError::Config(
                "ensembles need a model with random couplings".into(),
            ));
        }
        if let Some(tol) = self.numerics.cluster_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Config(format!(
                    "cluster_tol must be positive, got {tol}"
                )));
            }
        }
        if self.oracle.samples < 1000 {
            return Err(CliError::Config(
                "the oracle needs at least 1000 samples".into(),
            ));
        }
        if let Some(w) = self.oracle.window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(CliError::Config(format!(
                    "oracle window must be positive, got {w}"
                )));
            }
        }
        let heavy = match model {
            ModelSpec::Ising { sites, .. } | ModelSpec::Xyz { sites, .. } => {
                (sites >= 6).then(|| format!("L = {sites}"))
            }
            ModelSpec::Qrs {
                particles, quanta, ..
            } => (particles.max(quanta) >= 9).then(|| format!("N = {particles}, M = {quanta}")),
        };
        match heavy {
            Some(size) if !long_run => Err(CliError::LongRun { size }),
            _ => Ok(()),
        }
    }

    /// File stem for records of this run.
    pub fn stem(&self) -> CliResult<String> {
        let model = self.model_spec(0)?;
        let name = match &self.model {
            ModelConfig::Preset(p) => p.preset.clone(),
            ModelConfig::Explicit(m) => m.family_name().to_string(),
        };
        let seeds = match self.seed_kind()? {
            Some(k) => seed_kind_name(k).to_string(),
            None => "graded".to_string(),
        };
        Ok(format!(
            "{name}-{}-{}-{seeds}-{}",
            model.size_label(),
            self.seeds.variant.name(),
            self.numerics.precision_bits
        ))
    }
}

pub fn seed_kind_name(kind: SeedKind) -> &'static str {
    match kind {
        SeedKind::SingleSiteSpins => "single-site-spins",
        SeedKind::ZeroBody => "zero-body",
        SeedKind::NumberOperators => "number-operators",
        SeedKind::ProductStates => "product-states",
        SeedKind::SingleOperator => "single-operator",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<RunConfig> {
        RunConfig::from_toml(text, Path::new("test.toml"))
    }

    #[test]
    fn preset_config_with_defaults() {
        let c = parse("[model]\npreset = \"ising-integrable\"\nsize = 4\n").unwrap();
        assert_eq!(c.numerics.precision_bits, 256);
        assert_eq!(c.seed_kind().unwrap(), Some(SeedKind::SingleSiteSpins));
        assert_eq!(
            c.stem().unwrap(),
            "ising-integrable-4-operator-single-site-spins-256"
        );
        c.validate(false).unwrap();
    }

    #[test]
    fn explicit_model() {
        let c = parse(
            "[model]\nfamily = \"xyz\"\nsites = 3\nj_x = 1.0\nj_y = 1.0\nj_z = 1.0\nh_z = 0.0\n\n[seeds]\nvariant = \"state\"\n",
        )
        .unwrap();
        assert_eq!(c.seed_kind().unwrap(), Some(SeedKind::ProductStates));
        assert!(matches!(
            c.model_spec(0).unwrap(),
            ModelSpec::Xyz { sites: 3, .. }
        ));
    }

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig::preset("qrs-chaotic", 6, Variant::Operator);
        c.seeds.family = Some(SeedKind::NumberOperators);
        c.ensemble = EnsembleConfig {
            count: 20,
            base_rng_seed: Some(1000),
        };
        c.oracle.enabled = true;
        let back = parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(
            back.model_spec(3).unwrap().with_rng_seed(0),
            c.model_spec(0).unwrap().with_rng_seed(0)
        );
    }

    #[test]
    fn invalid_configs() {
        let bad_preset = parse("[model]\npreset = \"nope\"\nsize = 4\n").unwrap();
        assert!(matches!(
            bad_preset.validate(false),
            Err(CliError::UnknownPreset(_))
        ));

        let mut state_qrs = RunConfig::preset("qrs-integrable", 4, Variant::State);
        assert!(state_qrs.validate(false).is_err());
        state_qrs.seeds.variant = Variant::Operator;
        state_qrs.seeds.family = Some(SeedKind::ProductStates);
        assert!(state_qrs.validate(false).is_err());

        let mut chain_ensemble = RunConfig::preset("ising-chaotic", 4, Variant::Operator);
        chain_ensemble.ensemble.count = 5;
        assert!(chain_ensemble.validate(false).is_err());

        let mut low = RunConfig::preset("ising-chaotic", 4, Variant::Operator);
        low.numerics.precision_bits = 32;
        assert!(low.validate(false).is_err());

        assert!(parse("[model]\npreset = \"ising-chaotic\"\nsize = 4\nextra = 1\n").is_err());
    }

    #[test]
    fn large_sizes_need_long_run() {
        let c = RunConfig::preset("ising-chaotic", 6, Variant::Operator);
        assert!(matches!(c.validate(false), Err(CliError::LongRun { .. })));
        c.validate(true).unwrap();
        let q = RunConfig::preset("qrs-chaotic", 9, Variant::Operator);
        assert!(q.validate(false).is_err());
        q.validate(true).unwrap();
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::preset("qrs-chaotic", 6, Variant::Operator);
        c.apply(&Overrides {
            precision_bits: Some(128),
            output_dir: Some("out".into()),
            rng_seed: Some(7),
        });
        assert_eq!(c.numerics.precision_bits, 128);
        assert_eq!(
            c.model_spec(2).unwrap(),
            presets::find("qrs-chaotic")
                .unwrap()
                .model(6, SpinConvention::Pauli, 9)
        );
    }
}
