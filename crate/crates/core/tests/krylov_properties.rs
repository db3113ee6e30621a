use mskrylov::complexity::{normalize_pair, phi_coefficients, plateau_operator, EnsembleStats};
use mskrylov::hiprec::orthogonality_drift;
use mskrylov::krylov::{block_lanczos, lanczos, LanczosOptions, ReorthPolicy};
use mskrylov::models::{build_ising, spectral, HamiltonianAction, Liouvillian, SpinConvention};
use mskrylov::seeds::{orthonormalize, seeds_single_site_spins, SeedKind};
use mskrylov::{HComplex, HMatrix, HVector, Precision};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HMatrix::hermitian(&a + a.adjoint()).unwrap()
}

fn random_seeds(len: usize, m: usize, prec: Precision, rng: &mut ChaCha8Rng) -> Vec<HVector> {
    let raw = (0..m)
        .map(|_| {
            let v: Vec<Complex64> = (0..len)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            HVector::from_complex(&v, prec)
        })
        .collect();
    orthonormalize(raw, SeedKind::SingleOperator)
        .unwrap()
        .vectors
}

fn random_unitary(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .qr()
    .q()
}

/// `seeds · u` at working precision, re-orthonormalized.
fn rotate(seeds: &[HVector], u: &DMatrix<Complex64>, prec: Precision) -> Vec<HVector> {
    let raw = (0..seeds.len())
        .map(|k| {
            let mut v = HVector::zeros(seeds[0].len(), prec);
            for (n, s) in seeds.iter().enumerate() {
                v.sub_scaled(&HComplex::from_c64(-u[(n, k)], prec), s)
                    .unwrap();
            }
            v
        })
        .collect();
    orthonormalize(raw, SeedKind::SingleOperator)
        .unwrap()
        .vectors
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn block_recurrence_invariants(n in 2usize..=4, m in 1usize..=3, seed in any::<u64>()) {
        let prec = Precision::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, &mut rng);
        let op = Liouvillian::new(&h, prec).unwrap();
        let seeds = random_seeds(n * n, m, prec, &mut rng);
        let basis = block_lanczos(&op, &seeds, &LanczosOptions::new(prec)).unwrap();
        let thr = prec.reorth_threshold();

        prop_assert!(basis.tridiagonality_residual(&op).unwrap() <= thr * basis.norm_estimate);
        prop_assert!(basis.measured_drift().unwrap() <= thr);
        let w = basis.widths();
        prop_assert!(w.windows(2).all(|p| p[1] <= p[0]));
        prop_assert!(basis.total_len() <= n * n);

        let spec = spectral(&h, None).unwrap();
        let plateau = plateau_operator(&spec, &basis).unwrap();
        prop_assert!(plateau.value >= 0.0);
        prop_assert!(plateau.value <= (basis.level_count() - 1) as f64 + 1e-12);

        let t = rng.gen_range(0.0..50.0);
        for k in 0..seeds.len() {
            let total: f64 = phi_coefficients(&spec, &basis, k, t).unwrap().iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn plateau_is_invariant_under_seed_rotation(n in 2usize..=4, m in 2usize..=3, seed in any::<u64>()) {
        let prec = Precision::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, &mut rng);
        let op = Liouvillian::new(&h, prec).unwrap();
        let seeds = random_seeds(n * n, m, prec, &mut rng);
        let rotated = rotate(&seeds, &random_unitary(seeds.len(), &mut rng), prec);
        let spec = spectral(&h, None).unwrap();
        let a = plateau_operator(&spec, &block_lanczos(&op, &seeds, &LanczosOptions::new(prec)).unwrap()).unwrap();
        let b = plateau_operator(&spec, &block_lanczos(&op, &rotated, &LanczosOptions::new(prec)).unwrap()).unwrap();
        prop_assert_eq!(a.levels, b.levels);
        prop_assert!((a.value - b.value).abs() < 1e-8, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn single_seed_block_matches_lanczos(n in 2usize..=4, seed in any::<u64>()) {
        let prec = Precision::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, &mut rng);
        let op = Liouvillian::new(&h, prec).unwrap();
        let s = random_seeds(n * n, 1, prec, &mut rng);
        let run = lanczos(&op, &s[0], &LanczosOptions::new(prec)).unwrap();
        let basis = block_lanczos(&op, &s, &LanczosOptions::new(prec)).unwrap();
        prop_assert_eq!(basis.level_count(), run.len());
        let tol = prec.reorth_threshold() * basis.norm_estimate;
        for (blk, b) in basis.b_blocks.iter().zip(&run.b) {
            prop_assert!((blk.get(0, 0).abs() - b).abs().to_f64() <= tol);
        }
        for (blk, a) in basis.a_blocks.iter().zip(&run.a) {
            prop_assert!((blk.get(0, 0).re.clone() - a).abs().to_f64() <= tol);
        }
    }

    #[test]
    fn normalization_preserves_order(
        vi in 0.0f64..50.0, mi in 2usize..60, vc in 0.0f64..50.0, mc in 2usize..60,
    ) {
        let vi = vi.min((mi - 1) as f64);
        let vc = vc.min((mc - 1) as f64);
        let (a, b) = normalize_pair(vi, mi, vc, mc).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert_eq!(a < b, vi < vc);
    }

    #[test]
    fn ensemble_mean_is_bracketed(values in prop::collection::vec(-10.0f64..10.0, 1..40)) {
        let s = EnsembleStats::from_values(&values).unwrap();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.mean >= lo - 1e-12 && s.mean <= hi + 1e-12);
        prop_assert!(s.std_error >= 0.0);
        prop_assert_eq!(s.count, values.len());
    }

    #[test]
    fn hermitian_input_is_stored_exactly_hermitian(n in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut near = &a + a.adjoint();
        near[(0, n - 1)] += Complex64::new(1e-17, 0.0);
        let h = HMatrix::hermitian(near).unwrap();
        let d = h.as_dmatrix();
        prop_assert!((0..n).all(|i| (0..n).all(|j| d[(i, j)] == d[(j, i)].conj())));
    }
}

#[test]
fn clearly_non_hermitian_input_is_rejected() {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]).map(|x| Complex64::new(x, 0.0));
    assert!(HMatrix::hermitian(a).is_err());
}

#[test]
fn drift_estimate_bounds_measured_drift() {
    let prec = Precision::new(53).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = DMatrix::from_fn(100, 100, |_, _| rng.gen_range(-1.0..1.0));
    let h = HMatrix::from_real(&((&a + a.transpose()) * 0.5)).unwrap();
    let op = HamiltonianAction::new(&h, prec).unwrap();
    let seed = random_seeds(100, 1, prec, &mut rng);
    let opts = LanczosOptions::new(prec)
        .with_policy(ReorthPolicy::LocalOnly)
        .with_max_levels(60);
    let run = lanczos(&op, &seed[0], &opts).unwrap();
    let measured = orthogonality_drift(&run.basis.iter().collect::<Vec<_>>()).unwrap();
    let estimate = run.drift_log.iter().map(|d| d.estimate).fold(0.0, f64::max);
    assert!(
        measured > 1e-10,
        "orthogonality should decay without reorthogonalization: {measured:e}"
    );
    assert!(
        estimate >= measured,
        "estimate {estimate:e} < measured {measured:e}"
    );
}

#[test]
fn partial_policy_keeps_orthogonality_at_double_precision() {
    let prec = Precision::new(53).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = DMatrix::from_fn(100, 100, |_, _| rng.gen_range(-1.0..1.0));
    let h = HMatrix::from_real(&((&a + a.transpose()) * 0.5)).unwrap();
    let op = HamiltonianAction::new(&h, prec).unwrap();
    let seed = random_seeds(100, 1, prec, &mut rng);
    let run = lanczos(&op, &seed[0], &LanczosOptions::new(prec)).unwrap();
    let measured = orthogonality_drift(&run.basis.iter().collect::<Vec<_>>()).unwrap();
    assert!(measured <= prec.reorth_threshold(), "{measured:e}");
    assert!(run.drift_log.iter().any(|d| d.reorthogonalized));
}

#[test]
fn doubling_precision_leaves_the_plateau_unchanged() {
    let h = build_ising(4, -1.05, 0.5, SpinConvention::Pauli).unwrap();
    let spec = spectral(&h, None).unwrap();
    let run = |bits| {
        let prec = Precision::new(bits).unwrap();
        let seeds = seeds_single_site_spins(4, SpinConvention::Pauli, prec).unwrap();
        let op = Liouvillian::new(&h, prec).unwrap();
        block_lanczos(&op, &seeds.vectors, &LanczosOptions::new(prec)).unwrap()
    };
    let (lo, hi) = (run(128), run(256));
    assert_eq!(lo.widths(), hi.widths());
    for (x, y) in lo.b_blocks.iter().zip(&hi.b_blocks) {
        let diff = (x.to_dmatrix() - y.to_dmatrix()).map(|z| z.norm()).max();
        assert!(diff <= 1e-20 * y.max_abs(), "{diff:e}");
    }
    let (a, b) = (
        plateau_operator(&spec, &lo).unwrap().value,
        plateau_operator(&spec, &hi).unwrap().value,
    );
    assert!((a - b).abs() <= 1e-12 * b);
}
