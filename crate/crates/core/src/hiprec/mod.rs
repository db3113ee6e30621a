//! Configurable-precision complex vectors and the orthogonalization kernels
//! used inside the Lanczos loops.
//!
//! Scalars are MPFR floats at a single working precision. A complex vector
//! stores its real and imaginary parts as separate arrays; the imaginary part
//! is omitted while it is identically zero, which lets real Hamiltonians with
//! real seeds run the whole recurrence in real arithmetic.

mod dense;
mod scalar;
mod vector;

pub use dense::{symmetric_eigen, HMatrix};
pub use scalar::HComplex;
pub use vector::HVector;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mantissa width of the working arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 53;
    /// Keeps `epsilon()` a normal `f64`.
    pub const MAX_BITS: u32 = 1024;
    pub const DEFAULT_BITS: u32 = 256;

    pub fn new(bits: u32) -> Result<Self> {
        if !(Self::MIN_BITS..=Self::MAX_BITS).contains(&bits) {
            return Err(Error::Parameter(format!(
                "precision must be between {} and {} bits, got {bits}",
                Self::MIN_BITS,
                Self::MAX_BITS
            )));
        }
        Ok(Self(bits))
    }

    /// IEEE double.
    pub fn standard() -> Self {
        Self(53)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Unit roundoff `2^(1 - bits)`.
    pub fn epsilon(self) -> f64 {
        (1.0 - self.0 as f64).exp2()
    }

    /// `sqrt(epsilon)`: the orthogonality level that triggers full
    /// reorthogonalization and the relative deflation tolerance.
    pub fn reorth_threshold(self) -> f64 {
        self.epsilon().sqrt()
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self(Self::DEFAULT_BITS)
    }
}

impl TryFrom<u32> for Precision {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        Self::new(bits)
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.0
    }
}

/// `Σ conj(a_i) b_i`, the flattened form of `Tr[A† B]`.
pub fn inner(a: &HVector, b: &HVector) -> Result<HComplex> {
    a.inner(b)
}

/// Classical Gram–Schmidt of `v` against `basis`, repeated `passes` times.
///
/// Returns the residual and the accumulated projection coefficients
/// `c_i = <basis_i, v>` summed over passes, so that
/// `v = residual + Σ c_i basis_i`. A residual of (near) zero norm is a valid
/// result and signals linear dependence to the caller.
pub fn orthogonalize_against(
    v: &HVector,
    basis: &[&HVector],
    passes: usize,
) -> Result<(HVector, Vec<HComplex>)> {
    if !(1..=2).contains(&passes) {
        return Err(Error::Contract(format!(
            "orthogonalization passes must be 1 or 2, got {passes}"
        )));
    }
    let prec = v.precision();
    let mut out = v.clone();
    let mut total: Vec<HComplex> = (0..basis.len()).map(|_| HComplex::zero(prec)).collect();
    for _ in 0..passes {
        let coeffs = basis
            .iter()
            .map(|b| b.inner(&out))
            .collect::<Result<Vec<_>>>()?;
        for (b, c) in basis.iter().zip(&coeffs) {
            out.sub_scaled(c, b)?;
        }
        for (t, c) in total.iter_mut().zip(coeffs) {
            t.add_assign(&c);
        }
    }
    Ok((out, total))
}

/// Largest deviation of `basis` from orthonormality: the max over `i != j` of
/// `|<b_i, b_j>|` together with the max over `i` of `| ||b_i|| - 1 |`.
pub fn orthogonality_drift(basis: &[&HVector]) -> Result<f64> {
    let mut drift = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        let norm = a.norm().to_f64();
        drift = drift.max((norm - 1.0).abs());
        for b in &basis[i + 1..] {
            drift = drift.max(a.inner(b)?.abs_f64());
        }
    }
    Ok(drift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p256() -> Precision {
        Precision::new(256).unwrap()
    }

    #[test]
    fn precision_bounds() {
        assert!(Precision::new(52).is_err());
        assert!(Precision::new(2000).is_err());
        let p = Precision::new(53).unwrap();
        assert_eq!(p.epsilon(), f64::EPSILON);
        assert_eq!(p.reorth_threshold(), f64::EPSILON.sqrt());
        let p = p256();
        assert_eq!(p.epsilon(), 2f64.powi(-255));
    }

    #[test]
    fn inner_of_unit_axes() {
        let p = p256();
        let e0 = HVector::from_real(&[1.0, 0.0], p);
        let e1 = HVector::from_real(&[0.0, 1.0], p);
        assert_eq!(inner(&e0, &e0).unwrap().to_c64(), Complex64::new(1.0, 0.0));
        assert_eq!(inner(&e0, &e1).unwrap().to_c64(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        // a = (1, i)/√2, b = (1, -i)/√2: conj(i)·(-i) = -1 so <a,b> = (1 - 1)/2.
        let p = p256();
        let mut a = HVector::from_complex(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)], p);
        let mut b =
            HVector::from_complex(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)], p);
        a.normalize();
        b.normalize();
        let ab = inner(&a, &b).unwrap();
        assert!(ab.abs_f64() < p.epsilon());
        // <a,a> = 1 exactly up to rounding, and <a, i a> = i.
        let aa = inner(&a, &a).unwrap().to_c64();
        assert!((aa - Complex64::new(1.0, 0.0)).norm() < 4.0 * p.epsilon());
    }

    #[test]
    fn inner_rejects_length_mismatch() {
        let p = p256();
        let a = HVector::zeros(2, p);
        let b = HVector::zeros(3, p);
        assert!(matches!(inner(&a, &b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn single_projection() {
        let p = p256();
        let mut v = HVector::from_real(&[1.0, 1.0], p);
        v.normalize();
        let e0 = HVector::from_real(&[1.0, 0.0], p);
        let (r, c) = orthogonalize_against(&v, &[&e0], 2).unwrap();
        let half = 0.5f64.sqrt();
        assert!((c[0].to_c64() - Complex64::new(half, 0.0)).norm() < 1e-70);
        let rc = r.to_complex64();
        assert!(rc[0].norm() < 1e-70);
        assert!((rc[1] - Complex64::new(half, 0.0)).norm() < 1e-70);
    }

    #[test]
    fn dependent_input_collapses() {
        let p = p256();
        let e0 = HVector::from_real(&[1.0, 0.0, 0.0], p);
        let e1 = HVector::from_real(&[0.0, 1.0, 0.0], p);
        let v = HVector::from_real(&[0.3, -2.0, 0.0], p);
        let (r, _) = orthogonalize_against(&v, &[&e0, &e1], 2).unwrap();
        assert!(r.norm().to_f64() <= p.reorth_threshold());
    }

    #[test]
    fn passes_are_validated() {
        let p = p256();
        let v = HVector::zeros(2, p);
        assert!(orthogonalize_against(&v, &[], 3).is_err());
        assert!(orthogonalize_against(&v, &[], 0).is_err());
    }

    fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect()
    }

    /// Orthonormal set built by the test itself (modified Gram–Schmidt at
    /// working precision, two sweeps).
    fn orthonormal_set(rng: &mut ChaCha8Rng, n: usize, k: usize, p: Precision) -> Vec<HVector> {
        let mut out: Vec<HVector> = Vec::new();
        while out.len() < k {
            let mut v = HVector::from_complex(&random_complex(rng, n), p);
            for _ in 0..2 {
                for q in &out {
                    let c = q.inner(&v).unwrap();
                    v.sub_scaled(&c, q).unwrap();
                }
            }
            v.normalize();
            out.push(v);
        }
        out
    }

    #[test]
    fn two_passes_reach_sqrt_epsilon() {
        for bits in [53, 128, 256] {
            let p = Precision::new(bits).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let basis = orthonormal_set(&mut rng, 50, 10, p);
            let refs: Vec<&HVector> = basis.iter().collect();
            assert!(orthogonality_drift(&refs).unwrap() < 100.0 * p.epsilon());
            let v = HVector::from_complex(&random_complex(&mut rng, 50), p);
            let input_norm = v.norm().to_f64();
            let (r, _) = orthogonalize_against(&v, &refs, 2).unwrap();
            let worst = refs
                .iter()
                .map(|b| b.inner(&r).unwrap().abs_f64())
                .fold(0.0, f64::max);
            assert!(
                worst <= p.reorth_threshold() * input_norm,
                "bits {bits}: {worst}"
            );
        }
    }

    #[test]
    fn drift_of_constructed_pair() {
        let p = p256();
        let e0 = HVector::from_real(&[1.0, 0.0], p);
        let e1 = HVector::from_real(&[0.0, 1.0], p);
        assert!(orthogonality_drift(&[&e0, &e1]).unwrap() < p.epsilon());
        // (δ, sqrt(1 - δ²)) against e0 overlaps by exactly δ = 1e-8.
        let delta = rug::Float::with_val(256, 1e-8f64);
        let rest = (rug::Float::with_val(256, 1) - delta.clone().square()).sqrt();
        let tilted = HVector::from_parts(vec![delta, rest], None).unwrap();
        let d = orthogonality_drift(&[&e0, &tilted]).unwrap();
        assert!((d - 1e-8).abs() <= 2.0 * p.epsilon(), "{d}");
    }

    proptest! {
        #[test]
        fn inner_is_hermitian_symmetric(seed in 0u64..1000, n in 1usize..20) {
            let p = Precision::new(128).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = HVector::from_complex(&random_complex(&mut rng, n), p);
            let b = HVector::from_complex(&random_complex(&mut rng, n), p);
            let ab = a.inner(&b).unwrap().to_c64();
            let ba = b.inner(&a).unwrap().to_c64();
            prop_assert!((ab - ba.conj()).norm() <= 4.0 * p.epsilon() * (n as f64));
        }

        #[test]
        fn orthogonalization_is_idempotent(seed in 0u64..200) {
            let p = Precision::new(128).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis = orthonormal_set(&mut rng, 12, 4, p);
            let refs: Vec<&HVector> = basis.iter().collect();
            let v = HVector::from_complex(&random_complex(&mut rng, 12), p);
            let (once, _) = orthogonalize_against(&v, &refs, 2).unwrap();
            let (twice, _) = orthogonalize_against(&once, &refs, 2).unwrap();
            let mut diff = twice.clone();
            diff.sub_scaled(&HComplex::one(p), &once).unwrap();
            prop_assert!(diff.norm().to_f64() <= p.reorth_threshold());
        }
    }
}
