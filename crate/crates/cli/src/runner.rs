//! Orchestration: model → seeds → block Lanczos → plateau → oracle.

use std::time::Instant;

use mskrylov::complexity::{
    default_oracle_window, normalize_pair, plateau_operator, plateau_size, plateau_state,
    EigenFrame, EnsembleStats, PlateauResult,
};
use mskrylov::krylov::{block_lanczos, BlockKrylovBasis, LanczosOptions, LinearOperator};
use mskrylov::matrix_io::MatrixData;
use mskrylov::models::{
    spectral, HamiltonianAction, Liouvillian, ModelSpec, SpectralDecomposition,
};
use mskrylov::seeds::{
    graded_fock_basis, graded_pauli_basis, seeds_number_operators, seeds_product_states,
    seeds_single_site_spins, seeds_zero_body, SeedFamily, SeedKind,
};
use mskrylov::{HMatrix, Precision};
use rayon::prelude::*;

use crate::config::{RunConfig, Variant};
use crate::error::{CliError, CliResult};
use crate::record::{
    OracleCheck, PairRecord, Realization, RunRecord, RunSummary, SeedSummary, BAR_CONVENTION,
};

/// Worker pool shared by the ensemble and pair drivers.
pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    pub fn new(workers: usize) -> CliResult<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
        Ok(Self { pool })
    }

    /// Runs every realization of `config`; results keep realization order.
    pub fn run(&self, config: &RunConfig, long_run: bool) -> CliResult<RunRecord> {
        config.validate(long_run)?;
        let start = Instant::now();
        let realizations = self.pool.install(|| {
            (0..config.ensemble.count)
                .into_par_iter()
                .map(|r| {
                    let t = Instant::now();
                    evaluate(config, r).map(|x| (x, t.elapsed().as_secs_f64()))
                })
                .collect::<CliResult<Vec<_>>>()
        })?;
        let (realizations, seconds): (Vec<_>, Vec<_>) = realizations.into_iter().unzip();
        let mut record = RunRecord::new(config, config.model_spec(0)?);
        record.summary = Some(RunSummary::from_realizations(&realizations)?);
        record.realizations = realizations;
        record.timing.seconds = start.elapsed().as_secs_f64();
        record.timing.realization_seconds = seconds;
        Ok(record)
    }

    /// Runs both halves and normalizes them with the shared denominator.
    pub fn run_pair(
        &self,
        integrable: &RunConfig,
        chaotic: &RunConfig,
        long_run: bool,
    ) -> CliResult<PairRecord> {
        check_comparable(integrable, chaotic)?;
        let (a, b) = self.pool.join(
            || self.run(integrable, long_run),
            || self.run(chaotic, long_run),
        );
        pair_from_records(a?, b?)
    }
}

fn check_comparable(a: &RunConfig, b: &RunConfig) -> CliResult<()> {
    let (ma, mb) = (a.model_spec(0)?, b.model_spec(0)?);
    if ma.family_name() != mb.family_name() || ma.size_label() != mb.size_label() {
        return Err(CliError::Mismatch(format!(
            "{} size {} vs {} size {}",
            ma.family_name(),
            ma.size_label(),
            mb.family_name(),
            mb.size_label()
        )));
    }
    if a.seeds.variant != b.seeds.variant || a.seed_kind()? != b.seed_kind()? {
        return Err(CliError::Mismatch(
            "variants or seed families differ".into(),
        ));
    }
    Ok(())
}

/// Builds the comparison row from two finished records.
pub fn pair_from_records(integrable: RunRecord, chaotic: RunRecord) -> CliResult<PairRecord> {
    let si = integrable
        .summary
        .as_ref()
        .ok_or_else(|| CliError::Mismatch("integrable record has no result".into()))?;
    let sc = chaotic
        .summary
        .as_ref()
        .ok_or_else(|| CliError::Mismatch("chaotic record has no result".into()))?;
    let m_int = si.levels;
    let m_cha = sc.levels;
    let mut int_norm = 0.0;
    let mut cha_norm = Vec::with_capacity(chaotic.realizations.len());
    for r in &chaotic.realizations {
        let (i, c) = normalize_pair(si.value, m_int, r.result.value, m_cha)?;
        int_norm = i;
        cha_norm.push(c);
    }
    let stats = EnsembleStats::from_values(&cha_norm)?;
    let denominator = m_int.max(m_cha) - 1;
    Ok(PairRecord {
        schema: crate::record::PAIR_SCHEMA.to_string(),
        software_version: crate::record::software_version(),
        tag: integrable
            .config
            .pair_tag
            .clone()
            .or_else(|| chaotic.config.pair_tag.clone()),
        family: integrable.model.family_name().to_string(),
        size: integrable.model.size_label(),
        variant: integrable.config.seeds.variant,
        seed_kind: integrable.seeds_kind(),
        denominator,
        normalized_integrable: int_norm,
        normalized_chaotic: stats,
        integrable_lower: int_norm < stats.mean,
        integrable_lower_by_sem: int_norm < stats.mean - stats.std_error,
        bars: BAR_CONVENTION.to_string(),
        integrable,
        chaotic,
    })
}

pub(crate) fn build_seeds(
    model: &ModelSpec,
    kind: SeedKind,
    prec: Precision,
) -> CliResult<SeedFamily> {
    let family = match (model, kind) {
        (
            ModelSpec::Ising {
                sites,
                spin_convention,
                ..
            }
            | ModelSpec::Xyz {
                sites,
                spin_convention,
                ..
            },
            SeedKind::SingleSiteSpins,
        ) => seeds_single_site_spins(*sites, *spin_convention, prec)?,
        (
            ModelSpec::Ising { sites, .. } | ModelSpec::Xyz { sites, .. },
            SeedKind::ProductStates,
        ) => seeds_product_states(*sites, prec)?,
        (ModelSpec::Qrs { .. }, SeedKind::ZeroBody) => seeds_zero_body(&fock(model)?, prec)?,
        (ModelSpec::Qrs { .. }, SeedKind::NumberOperators) => {
            seeds_number_operators(&fock(model)?, prec)?
        }
        (_, k) => {
            return Err(CliError::Config(format!(
                "seed family {k:?} does not apply to {}",
                model.family_name()
            )))
        }
    };
    Ok(family)
}

fn fock(model: &ModelSpec) -> CliResult<mskrylov::models::FockBlock> {
    model
        .fock_block()
        .ok_or_else(|| CliError::Config("not a resonant system".into()))?
        .map_err(CliError::from)
}

struct Krylov {
    family: SeedFamily,
    basis: BlockKrylovBasis,
}

fn grow(op: &dyn LinearOperator, family: SeedFamily, opts: &LanczosOptions) -> CliResult<Krylov> {
    let basis = block_lanczos(op, &family.vectors, opts)?;
    Ok(Krylov { family, basis })
}

/// One realization of `config`.
pub fn evaluate(config: &RunConfig, realization: usize) -> CliResult<Realization> {
    let model = config.model_spec(realization)?;
    let prec = config.precision()?;
    let h = model.build()?;
    let spec = spectral(&h, config.numerics.cluster_tol)?;
    let mut opts = LanczosOptions::new(prec).with_policy(config.numerics.policy);
    opts.max_levels = config.numerics.max_levels;

    let (mut result, frame, krylov) = match config.seeds.variant {
        Variant::Operator | Variant::State => {
            let kind = config
                .seed_kind()?
                .expect("operator and state runs have seeds");
            let family = build_seeds(&model, kind, prec)?;
            let krylov = if config.seeds.variant == Variant::Operator {
                grow(&Liouvillian::new(&h, prec)?, family, &opts)?
            } else {
                grow(&HamiltonianAction::new(&h, prec)?, family, &opts)?
            };
            let (result, frame) = contract(config.seeds.variant, &spec, &krylov.basis)?;
            (result, frame, Some(krylov))
        }
        Variant::Size => {
            let graded = match &model {
                ModelSpec::Qrs { .. } => graded_fock_basis(&fock(&model)?),
                ModelSpec::Ising { sites, .. } | ModelSpec::Xyz { sites, .. } => {
                    graded_pauli_basis(*sites)?
                }
            };
            let simple = graded.simple_set();
            (
                plateau_size(&spec, &graded, &simple)?,
                EigenFrame::size(&spec, &graded, &simple)?,
                None,
            )
        }
    };

    if let (true, Some(k)) = (config.numerics.measure_drift, &krylov) {
        result.diagnostics.measured_drift = Some(k.basis.measured_drift()?);
    }
    let oracle = if config.oracle.enabled {
        let window = config
            .oracle
            .window
            .unwrap_or_else(|| default_oracle_window(&frame));
        let value = frame.time_average(window, config.oracle.samples)?;
        Some(OracleCheck::new(
            window,
            config.oracle.samples,
            value,
            result.value,
        ))
    } else {
        None
    };
    if config.checkpoint {
        if let Some(k) = &krylov {
            write_checkpoint(config, realization, &h, k)?;
        }
    }
    let seeds = match &krylov {
        Some(k) => SeedSummary {
            kind: Some(k.family.kind),
            requested: k.family.requested,
            retained: k.family.m(),
            deflated: k.family.deflated.clone(),
        },
        None => SeedSummary {
            kind: None,
            requested: frame.seed_count(),
            retained: frame.seed_count(),
            deflated: Vec::new(),
        },
    };
    Ok(Realization {
        rng_seed: matches!(model, ModelSpec::Qrs { .. })
            .then(|| config.base_rng_seed() + realization as u64),
        result,
        seeds,
        oracle,
    })
}

fn contract(
    variant: Variant,
    spec: &SpectralDecomposition,
    basis: &BlockKrylovBasis,
) -> CliResult<(PlateauResult, EigenFrame)> {
    Ok(match variant {
        Variant::State => (plateau_state(spec, basis)?, EigenFrame::state(spec, basis)?),
        _ => (
            plateau_operator(spec, basis)?,
            EigenFrame::operator(spec, basis)?,
        ),
    })
}

fn write_checkpoint(
    config: &RunConfig,
    realization: usize,
    h: &HMatrix,
    k: &Krylov,
) -> CliResult<()> {
    let dir = config
        .output_dir
        .clone()
        .unwrap_or_else(|| crate::record::DEFAULT_OUTPUT_DIR.into())
        .join(format!("{}-r{realization}", config.stem()?));
    std::fs::create_dir_all(&dir)?;
    MatrixData::from_hmatrix(h).save(&dir.join("hamiltonian.txt"))?;
    MatrixData::from_vectors(&k.family.vectors)?.save(&dir.join("seeds.txt"))?;
    let all: Vec<_> = k.basis.iter().map(|(_, v)| v.clone()).collect();
    MatrixData::from_vectors(&all)?.save(&dir.join("basis.txt"))?;
    let widths = serde_json::json!({
        "widths": k.basis.widths(),
        "deflated": k.basis.deflated,
        "drift_log": k.basis.drift_log.iter().map(|r| (r.level, r.estimate, r.reorthogonalized)).collect::<Vec<_>>(),
    });
    crate::record::write_atomic(
        &dir.join("levels.json"),
        &serde_json::to_vec_pretty(&widths)?,
    )?;
    Ok(())
}
