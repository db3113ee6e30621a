//! Property and acceptance checks, shared by `mskrylov verify` and the
//! acceptance test target.

use std::f64::consts::PI;
use std::fmt;

use mskrylov::complexity::{
    c_mult_timeseries, phi_coefficients, plateau_from_tridiagonal, plateau_operator,
    time_average_oracle,
};
use mskrylov::krylov::{block_lanczos, lanczos, BlockKrylovBasis, LanczosOptions};
use mskrylov::models::{
    build_ising, spectral, Liouvillian, ModelSpec, SpectralDecomposition, SpinConvention,
};
use mskrylov::seeds::{orthonormalize, SeedKind};
use mskrylov::{HComplex, HMatrix, HVector, Precision};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::{RunConfig, Variant};
use crate::error::CliResult;
use crate::record::PairRecord;
use crate::runner::{build_seeds, Runner};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Rolls sub-checks into one line that passes when all of them do.
fn combine(name: &str, parts: &[Check]) -> Check {
    let failed: Vec<&str> = parts
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    let detail = parts
        .iter()
        .map(|c| {
            format!(
                "[{} {}] {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Check::new(name, failed.is_empty(), detail)
}

/// A small instance of the pipeline, kept in memory.
struct Instance {
    label: String,
    op: Liouvillian,
    spec: SpectralDecomposition,
    seeds: Vec<HVector>,
    basis: BlockKrylovBasis,
    prec: Precision,
}

impl Instance {
    fn new(label: &str, model: &ModelSpec, kind: SeedKind, prec: Precision) -> CliResult<Self> {
        let h = model.build()?;
        let op = Liouvillian::new(&h, prec)?;
        let seeds = build_seeds(model, kind, prec)?.vectors;
        let basis = block_lanczos(&op, &seeds, &LanczosOptions::new(prec))?;
        Ok(Self {
            label: label.to_string(),
            op,
            spec: spectral(&h, None)?,
            seeds,
            basis,
            prec,
        })
    }

    fn threshold(&self) -> f64 {
        self.prec.reorth_threshold()
    }
}

fn ci_set(prec: Precision) -> CliResult<Vec<Instance>> {
    let chain = |preset: &str, size| {
        crate::presets::find(preset).map(|p| p.model(size, SpinConvention::Pauli, 0))
    };
    Ok(vec![
        Instance::new(
            "ising-chaotic L=3",
            &chain("ising-chaotic", 3)?,
            SeedKind::SingleSiteSpins,
            prec,
        )?,
        Instance::new(
            "xyz-integrable L=3",
            &chain("xyz-integrable", 3)?,
            SeedKind::SingleSiteSpins,
            prec,
        )?,
        Instance::new(
            "xyz-chaotic L=3",
            &chain("xyz-chaotic", 3)?,
            SeedKind::SingleSiteSpins,
            prec,
        )?,
        Instance::new(
            "qrs-integrable N=M=4",
            &chain("qrs-integrable", 4)?,
            SeedKind::ZeroBody,
            prec,
        )?,
        Instance::new(
            "qrs-chaotic N=M=5",
            &chain("qrs-chaotic", 5)?.with_rng_seed(11),
            SeedKind::NumberOperators,
            prec,
        )?,
    ])
}

/// Deterministic unitary from the QR factorization of a fixed matrix.
fn fixed_unitary(m: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(m, m, |i, j| {
        let k = (i * m + j) as f64;
        Complex64::new((1.3 * k + 0.7).sin(), (0.9 * k + 0.2).cos())
    });
    a.qr().q()
}

/// `seeds · u`, accumulated at full precision and re-orthonormalized so the
/// f64 rounding of `u` does not leak into the family.
fn rotate(seeds: &[HVector], u: &DMatrix<Complex64>, prec: Precision) -> CliResult<Vec<HVector>> {
    let len = seeds[0].len();
    let mut out = Vec::with_capacity(seeds.len());
    for k in 0..seeds.len() {
        let mut v = HVector::zeros(len, prec);
        for (n, s) in seeds.iter().enumerate() {
            v.sub_scaled(&HComplex::from_c64(-u[(n, k)], prec), s)?;
        }
        out.push(v);
    }
    Ok(orthonormalize(out, SeedKind::SingleOperator)?.vectors)
}

/// Properties (a) through (i) on the CI set at 256 bits.
pub fn property_suite() -> CliResult<Vec<Check>> {
    let prec = Precision::new(256)?;
    let set = ci_set(prec)?;
    let mut checks = Vec::new();

    let mut worst = Vec::new();
    let mut ok = true;
    for inst in &set {
        let r = inst.basis.tridiagonality_residual(&inst.op)?;
        let bound = inst.threshold() * inst.basis.norm_estimate;
        ok &= r <= bound;
        worst.push(format!("{} {r:.1e} (bound {bound:.1e})", inst.label));
    }
    checks.push(Check::new("(a) block tridiagonality", ok, worst.join(", ")));

    let mut worst = 0.0f64;
    for inst in &set {
        worst = worst.max(inst.basis.measured_drift()?);
    }
    checks.push(Check::new(
        "(b) final orthogonality drift",
        worst <= prec.reorth_threshold(),
        format!(
            "max {worst:.1e} vs sqrt(eps) {:.1e}",
            prec.reorth_threshold()
        ),
    ));

    let widths: Vec<Vec<usize>> = set.iter().map(|i| i.basis.widths()).collect();
    let monotone = widths.iter().all(|w| w.windows(2).all(|p| p[1] <= p[0]));
    checks.push(Check::new(
        "(c) widths non-increasing",
        monotone,
        format!("{widths:?}"),
    ));

    checks.push(conserved_seeds(prec)?);
    checks.push(hermitian_single_seed(&set[0])?);

    let mut worst = 0.0f64;
    for inst in set.iter().filter(|i| i.seeds.len() > 1) {
        let rotated = rotate(&inst.seeds, &fixed_unitary(inst.seeds.len()), prec)?;
        let again = block_lanczos(&inst.op, &rotated, &LanczosOptions::new(prec))?;
        let a = plateau_operator(&inst.spec, &inst.basis)?.value;
        let b = plateau_operator(&inst.spec, &again)?.value;
        worst = worst.max((a - b).abs());
    }
    checks.push(Check::new(
        "(f) seed-rotation invariance",
        worst <= 1e-8,
        format!("max |Δ| {worst:.1e}"),
    ));

    let mut worst = 0.0f64;
    for inst in &set {
        for n in 0..inst.seeds.len() {
            for t in [0.37, 2.9, 41.0] {
                let total: f64 = phi_coefficients(&inst.spec, &inst.basis, n, t)?
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum();
                worst = worst.max((total - 1.0).abs());
            }
        }
    }
    checks.push(Check::new(
        "(g) unitarity",
        worst <= 1e-10,
        format!("max |Σ|φ|² - 1| {worst:.1e}"),
    ));

    checks.push(single_seed_consistency(&set)?);
    checks.push(precision_stability()?);
    Ok(checks)
}

fn conserved_seeds(prec: Precision) -> CliResult<Check> {
    let h = build_ising(3, 0.0, 0.3, SpinConvention::Pauli)?;
    let d = 8;
    let seeds: Vec<HVector> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d * d];
            e[i * d + i] = 1.0;
            HVector::from_real(&e, prec)
        })
        .collect();
    let op = Liouvillian::new(&h, prec)?;
    let basis = block_lanczos(&op, &seeds, &LanczosOptions::new(prec))?;
    let plateau = plateau_operator(&spectral(&h, None)?, &basis)?.value;
    Ok(Check::new(
        "(d) conserved seeds",
        basis.level_count() == 1 && plateau == 0.0,
        format!("M = {}, plateau {plateau:e}", basis.level_count()),
    ))
}

fn hermitian_single_seed(inst: &Instance) -> CliResult<Check> {
    let run = lanczos(&inst.op, &inst.seeds[0], &LanczosOptions::new(inst.prec))?;
    let worst = run.a_f64().iter().map(|a| a.abs()).fold(0.0, f64::max);
    let bound = inst.threshold() * run.norm_estimate;
    Ok(Check::new(
        "(e) Hermitian seed has vanishing a_j",
        worst <= bound,
        format!(
            "{}: K = {}, max |a_j| {worst:.1e} (bound {bound:.1e})",
            inst.label,
            run.len()
        ),
    ))
}

fn single_seed_consistency(set: &[Instance]) -> CliResult<Check> {
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for inst in set {
        let seed = &inst.seeds[0];
        let single = lanczos(&inst.op, seed, &LanczosOptions::new(inst.prec))?;
        let block = block_lanczos(
            &inst.op,
            std::slice::from_ref(seed),
            &LanczosOptions::new(inst.prec),
        )?;
        if block.level_count() != single.len() {
            detail.push(format!(
                "{}: K {} vs M {}",
                inst.label,
                single.len(),
                block.level_count()
            ));
            worst = f64::INFINITY;
            continue;
        }
        for (blk, a) in block.a_blocks.iter().zip(&single.a) {
            worst = worst.max((blk.get(0, 0).re.clone() - a).abs().to_f64());
        }
        for (blk, b) in block.b_blocks.iter().zip(&single.b) {
            worst = worst.max((blk.get(0, 0).abs() - b).abs().to_f64());
        }
    }
    let bound = set[0].threshold();
    if detail.is_empty() {
        detail.push(format!("max coefficient difference {worst:.1e}"));
    }
    Ok(Check::new(
        "(h) m = 1 block run matches single-seed Lanczos",
        worst <= bound,
        detail.join(", "),
    ))
}

fn precision_stability() -> CliResult<Check> {
    let lo = ci_set(Precision::new(128)?)?;
    let hi = ci_set(Precision::new(256)?)?;
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (a, b) in lo.iter().zip(&hi) {
        if a.basis.widths() != b.basis.widths() {
            detail.push(format!("{}: widths differ", a.label));
            worst = f64::INFINITY;
            continue;
        }
        let mut inst_worst = 0.0f64;
        for (x, y) in a.basis.b_blocks.iter().zip(&b.basis.b_blocks) {
            let scale = y.max_abs();
            for i in 0..y.rows() {
                for j in 0..y.cols() {
                    let d = (x.get(i, j).to_c64() - y.get(i, j).to_c64()).norm();
                    if y.get(i, j).abs_f64() > 0.0 {
                        inst_worst = inst_worst.max(d / scale);
                    }
                }
            }
        }
        detail.push(format!("{} {inst_worst:.1e}", a.label));
        worst = worst.max(inst_worst);
    }
    Ok(Check::new(
        "(i) 128 -> 256 bits changes B by <= 1e-20 relative",
        worst <= 1e-20,
        detail.join(", "),
    ))
}

/// `H = diag(1, -1)` with seed `σ_x / sqrt(2)`.
pub fn two_level() -> CliResult<Check> {
    let prec = Precision::new(256)?;
    let h = HMatrix::from_real(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]))?;
    let mut seed = HVector::from_real(&[0.0, 1.0, 1.0, 0.0], prec);
    seed.normalize();
    let op = Liouvillian::new(&h, prec)?;
    let run = lanczos(&op, &seed, &LanczosOptions::new(prec))?;
    let basis = block_lanczos(&op, &[seed], &LanczosOptions::new(prec))?;
    let spec = spectral(&h, None)?;
    let times: Vec<f64> = (0..50).map(|k| 0.113 * k as f64).collect();
    let series = c_mult_timeseries(&spec, &basis, &times)?;
    let series_err = times
        .iter()
        .zip(&series.values)
        .map(|(t, c)| (c - (2.0 * t).sin().powi(2)).abs())
        .fold(0.0, f64::max);
    let plateau = plateau_operator(&spec, &basis)?.value;
    let direct = plateau_from_tridiagonal(&run.a_f64(), &run.b_f64())?;
    let oracle = time_average_oracle(&spec, &basis, 100.0 * PI, 4000)?;
    let b1 = run.b_f64().first().copied().unwrap_or(f64::NAN);
    let passed = run.len() == 2
        && (b1 - 2.0).abs() <= 1e-10
        && series_err <= 1e-10
        && (plateau - 0.5).abs() <= 1e-10
        && (direct - 0.5).abs() <= 1e-10
        && (oracle - 0.5).abs() <= 1e-3;
    Ok(Check::new(
        "two-level analytic case",
        passed,
        format!(
            "K = {}, b_1 = {b1}, max |C(t) - sin²(2t)| {series_err:.1e}, plateau {plateau}, tridiagonal {direct}, oracle {oracle:.6}",
            run.len()
        ),
    ))
}

/// Orthonormalization sanity for the audit log.
pub fn seed_family_check() -> CliResult<Check> {
    let prec = Precision::new(128)?;
    let a = HVector::from_real(&[1.0, 0.0, 0.0], prec);
    let b = HVector::from_real(&[1.0, 1.0, 0.0], prec);
    let c = HVector::from_real(&[2.0, 1.0, 0.0], prec);
    let f = orthonormalize(vec![a, b, c], SeedKind::SingleOperator)?;
    Ok(Check::new(
        "seed deflation",
        f.m() == 2 && f.deflated == vec![2],
        format!("m = {}, deflated {:?}", f.m(), f.deflated),
    ))
}

/// Fast checks run by `mskrylov verify`.
pub fn quick_suite() -> CliResult<Vec<Check>> {
    let mut checks = property_suite()?;
    checks.push(two_level()?);
    checks.push(seed_family_check()?);
    Ok(checks)
}

/// Sizes and ensemble counts for the acceptance run.
#[derive(Clone, Debug)]
pub struct Scale {
    pub chain_sizes: Vec<usize>,
    /// `(N = M, chaotic realizations)`.
    pub qrs: Vec<(usize, usize)>,
    pub long_run: bool,
}

impl Scale {
    pub fn desk() -> Self {
        Self {
            chain_sizes: vec![4, 5],
            qrs: vec![(6, 20), (7, 20)],
            long_run: false,
        }
    }

    pub fn long() -> Self {
        Self {
            chain_sizes: vec![4, 5, 6],
            qrs: vec![(9, 80), (10, 40), (11, 20)],
            long_run: true,
        }
    }
}

/// One integrable/chaotic preset comparison. Operator runs enable the oracle.
#[derive(Clone, Debug)]
pub struct PairRequest<'a> {
    pub integrable: &'a str,
    pub chaotic: &'a str,
    pub size: usize,
    pub variant: Variant,
    pub seeds: Option<SeedKind>,
    pub realizations: usize,
}

impl<'a> PairRequest<'a> {
    pub fn new(integrable: &'a str, chaotic: &'a str, size: usize, variant: Variant) -> Self {
        Self {
            integrable,
            chaotic,
            size,
            variant,
            seeds: None,
            realizations: 1,
        }
    }

    pub fn seeds(mut self, kind: SeedKind) -> Self {
        self.seeds = Some(kind);
        self
    }

    pub fn realizations(mut self, count: usize) -> Self {
        self.realizations = count;
        self
    }

    pub fn run(&self, runner: &Runner, long_run: bool) -> CliResult<PairRecord> {
        let mut a = RunConfig::preset(self.integrable, self.size, self.variant);
        let mut b = RunConfig::preset(self.chaotic, self.size, self.variant);
        for c in [&mut a, &mut b] {
            c.seeds.family = self.seeds;
            c.oracle.enabled = self.variant == Variant::Operator;
        }
        if self.realizations > 1 {
            b.ensemble.count = self.realizations;
            b.ensemble.base_rng_seed = Some(1000);
        }
        runner.run_pair(&a, &b, long_run)
    }
}

fn describe(p: &PairRecord) -> String {
    format!(
        "{}={} int {:.4} cha {:.4}±{:.4} (M-1 = {})",
        if p.family == "qrs" { "N" } else { "L" },
        p.size,
        p.normalized_integrable,
        p.normalized_chaotic.mean,
        p.normalized_chaotic.std_error,
        p.denominator
    )
}

fn ordering(name: &str, pairs: &[PairRecord], by_sem: bool) -> Check {
    let ok = pairs.iter().all(|p| {
        if by_sem {
            p.integrable_lower_by_sem
        } else {
            p.integrable_lower
        }
    });
    Check::new(
        name,
        ok,
        pairs.iter().map(describe).collect::<Vec<_>>().join(", "),
    )
}

const XYZ_PAIRS: [(&str, &str); 2] = [
    ("xyz-integrable-small-jz", "xyz-chaotic-small-jz"),
    ("xyz-integrable", "xyz-chaotic"),
];

/// Every acceptance criterion, one check each.
pub fn acceptance(runner: &Runner, scale: &Scale) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let mut operator_pairs: Vec<PairRecord> = Vec::new();
    let op = Variant::Operator;
    let spins = SeedKind::SingleSiteSpins;
    let long = scale.long_run;

    let ising: Vec<PairRecord> = scale
        .chain_sizes
        .iter()
        .map(|&l| {
            PairRequest::new("ising-integrable", "ising-chaotic", l, op)
                .seeds(spins)
                .run(runner, long)
        })
        .collect::<CliResult<_>>()?;
    checks.push(ordering(
        "Ising ordering (single-site seeds)",
        &ising,
        false,
    ));
    operator_pairs.extend(ising);

    let mut xyz_parts = Vec::new();
    for (int, cha) in XYZ_PAIRS {
        let pairs: Vec<PairRecord> = scale
            .chain_sizes
            .iter()
            .map(|&l| {
                PairRequest::new(int, cha, l, op)
                    .seeds(spins)
                    .run(runner, long)
            })
            .collect::<CliResult<_>>()?;
        xyz_parts.push(ordering(int, &pairs, false));
        operator_pairs.extend(pairs);
    }
    let any = xyz_parts.iter().any(|c| c.passed);
    let mut xyz = combine("XYZ ordering (at least one integrable preset)", &xyz_parts);
    xyz.passed = any;
    checks.push(xyz);

    let mut qrs_parts = Vec::new();
    for kind in [SeedKind::ZeroBody, SeedKind::NumberOperators] {
        let pairs: Vec<PairRecord> = scale
            .qrs
            .iter()
            .map(|&(n, count)| {
                PairRequest::new("qrs-integrable", "qrs-chaotic", n, op)
                    .seeds(kind)
                    .realizations(count)
                    .run(runner, long)
            })
            .collect::<CliResult<_>>()?;
        qrs_parts.push(ordering(crate::config::seed_kind_name(kind), &pairs, true));
        operator_pairs.extend(pairs);
    }
    checks.push(combine(
        "QRS ordering (integrable < chaotic mean - SEM)",
        &qrs_parts,
    ));

    let mut worst = 0.0f64;
    let mut count = 0;
    let mut expected = 0;
    for p in &operator_pairs {
        for r in p
            .integrable
            .realizations
            .iter()
            .chain(&p.chaotic.realizations)
        {
            expected += 1;
            if let Some(o) = &r.oracle {
                worst = worst.max(o.relative_error);
                count += 1;
            }
        }
    }
    checks.push(Check::new(
        "oracle equivalence (<= 1%)",
        count == expected && worst <= 0.01,
        format!("{count} runs, worst relative error {worst:.2e}"),
    ));

    checks.push(combine("property suite (a)-(i)", &property_suite()?));
    checks.push(two_level()?);

    let st = Variant::State;
    let mut state_parts = Vec::new();
    for (int, cha) in [("ising-integrable", "ising-chaotic")]
        .into_iter()
        .chain(XYZ_PAIRS)
    {
        let pair = PairRequest::new(int, cha, 4, st)
            .seeds(SeedKind::ProductStates)
            .run(runner, false)?;
        state_parts.push(ordering(int, &[pair], false));
    }
    checks.push(combine("state variant ordering, L = 4", &state_parts));

    let sz = Variant::Size;
    let size_ge = |name: &str, p: PairRecord| {
        let ok = p.normalized_integrable >= p.normalized_chaotic.mean;
        Check::new(
            name,
            ok,
            format!("{} (integrable >= chaotic expected)", describe(&p)),
        )
    };
    let mut size_parts = Vec::new();
    for (int, cha) in XYZ_PAIRS {
        size_parts.push(size_ge(
            int,
            PairRequest::new(int, cha, 4, sz).run(runner, false)?,
        ));
    }
    let qrs = PairRequest::new("qrs-integrable", "qrs-chaotic", 6, sz)
        .realizations(20)
        .run(runner, false)?;
    size_parts.push(size_ge("qrs N=M=6", qrs));
    let ising_size =
        PairRequest::new("ising-integrable", "ising-chaotic", 4, sz).run(runner, false)?;
    let ising_complexity = match operator_pairs
        .iter()
        .find(|p| p.family == "ising" && p.size == 4)
    {
        Some(p) => p.clone(),
        None => PairRequest::new("ising-integrable", "ising-chaotic", 4, op)
            .seeds(spins)
            .run(runner, false)?,
    };
    size_parts.push(Check::new(
        "ising sign",
        ising_size.integrable_lower == ising_complexity.integrable_lower,
        format!(
            "size {}, complexity {}",
            describe(&ising_size),
            describe(&ising_complexity)
        ),
    ));
    checks.push(combine(
        "operator size diagnostic, L = 4 and N = M = 6",
        &size_parts,
    ));
    Ok(checks)
}
