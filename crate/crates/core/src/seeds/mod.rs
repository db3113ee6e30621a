//! Seed families `Ω_0` (operators) and `Ψ_0` (states), and graded operator
//! bases for the operator-size diagnostic.
//!
//! Ordering is fixed so that Gram–Schmidt with deflation is reproducible:
//! single-site spins are site-major then x, y, z; number operators are
//! mode-ascending; product states run over the directions
//! +z, -z, +x, -x, +y, -y, first all aligned and then with one flipped site,
//! sites ascending.

mod graded;

pub use graded::{graded_fock_basis, graded_pauli_basis, GradedBasis, Grading};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hiprec::{orthogonalize_against, HVector, Precision};
use crate::models::{site_operator, Axis, FockBlock, SpinConvention};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedKind {
    SingleSiteSpins,
    ZeroBody,
    NumberOperators,
    ProductStates,
    SingleOperator,
}

impl SeedKind {
    /// Whether the family lives in Hilbert space rather than operator space.
    pub fn is_state_family(self) -> bool {
        matches!(self, SeedKind::ProductStates)
    }
}

/// An orthonormal seed family after deflation.
#[derive(Clone, Debug)]
pub struct SeedFamily {
    pub kind: SeedKind,
    pub vectors: Vec<HVector>,
    /// Size of the raw family before orthonormalization.
    pub requested: usize,
    /// Indices into the raw family of members dropped as dependent.
    pub deflated: Vec<usize>,
}

impl SeedFamily {
    /// Number of retained seeds `m`.
    pub fn m(&self) -> usize {
        self.vectors.len()
    }

    pub fn single(vector: HVector) -> Result<Self> {
        let mut v = vector;
        if v.normalize().is_zero() {
            return Err(Error::EmptySeeds);
        }
        Ok(Self {
            kind: SeedKind::SingleOperator,
            vectors: vec![v],
            requested: 1,
            deflated: Vec::new(),
        })
    }
}

/// Orthonormalizes `raw` in order with two-pass Gram–Schmidt, dropping
/// members whose residual is at most `sqrt(eps)` times their input norm.
pub fn orthonormalize(raw: Vec<HVector>, kind: SeedKind) -> Result<SeedFamily> {
    let requested = raw.len();
    let mut vectors: Vec<HVector> = Vec::new();
    let mut deflated = Vec::new();
    for (idx, v) in raw.into_iter().enumerate() {
        let scale = v.norm().to_f64();
        let thr = v.precision().reorth_threshold();
        let refs: Vec<&HVector> = vectors.iter().collect();
        let (mut r, _) = orthogonalize_against(&v, &refs, 2)?;
        if scale == 0.0 || r.norm().to_f64() <= thr * scale {
            deflated.push(idx);
            continue;
        }
        r.normalize();
        vectors.push(r);
    }
    if vectors.is_empty() {
        return Err(Error::EmptySeeds);
    }
    Ok(SeedFamily {
        kind,
        vectors,
        requested,
        deflated,
    })
}

fn flatten(m: &nalgebra::DMatrix<Complex64>) -> Vec<Complex64> {
    let (r, c) = m.shape();
    (0..r * c).map(|k| m[(k / c, k % c)]).collect()
}

fn check_sites(sites: usize) -> Result<()> {
    if !(3..=12).contains(&sites) {
        return Err(Error::Parameter(format!(
            "chains need between 3 and 12 sites, got {sites}"
        )));
    }
    Ok(())
}

/// The `3L` operators `S_a^{(j)}`, normalized.
pub fn seeds_single_site_spins(
    sites: usize,
    convention: SpinConvention,
    prec: Precision,
) -> Result<SeedFamily> {
    check_sites(sites)?;
    let mut vectors = Vec::with_capacity(3 * sites);
    for site in 0..sites {
        for axis in Axis::ALL {
            let mut v = HVector::from_complex(
                &flatten(&site_operator(sites, site, axis, convention)),
                prec,
            );
            v.normalize();
            vectors.push(v);
        }
    }
    Ok(SeedFamily {
        kind: SeedKind::SingleSiteSpins,
        requested: vectors.len(),
        vectors,
        deflated: Vec::new(),
    })
}

/// Fock-diagonal projectors `|F_i><F_i|`.
pub fn seeds_zero_body(block: &FockBlock, prec: Precision) -> Result<SeedFamily> {
    let d = block.dim();
    let vectors: Vec<HVector> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d * d];
            e[i * d + i] = 1.0;
            HVector::from_real(&e, prec)
        })
        .collect();
    Ok(SeedFamily {
        kind: SeedKind::ZeroBody,
        requested: d,
        vectors,
        deflated: Vec::new(),
    })
}

/// `a_k† a_k` restricted to the block for `k = 0..=M`, orthonormalized.
pub fn seeds_number_operators(block: &FockBlock, prec: Precision) -> Result<SeedFamily> {
    let d = block.dim();
    let raw: Vec<HVector> = (0..block.modes())
        .map(|k| {
            let mut n = vec![0.0; d * d];
            for (i, occ) in block.states().iter().enumerate() {
                n[i * d + i] = occ[k] as f64;
            }
            HVector::from_real(&n, prec)
        })
        .collect();
    orthonormalize(raw, SeedKind::NumberOperators)
}

const DIRECTIONS: [(Complex64, Complex64); 6] = [
    (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
    (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
    (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
    (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)),
    (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
    (Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)),
];

/// Unnormalized product state with Gaussian-integer entries; exact in `f64`.
fn product_state(spinors: &[(Complex64, Complex64)]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for (up, down) in spinors {
        out = out.iter().flat_map(|&a| [a * up, a * down]).collect();
    }
    out
}

/// The `6 + 6L` raw product states, in seed order.
pub fn raw_product_states(sites: usize) -> Vec<Vec<Complex64>> {
    let mut raw = Vec::with_capacity(6 + 6 * sites);
    for dir in DIRECTIONS {
        raw.push(product_state(&vec![dir; sites]));
    }
    for (k, dir) in DIRECTIONS.iter().enumerate() {
        let flipped = DIRECTIONS[k ^ 1];
        for site in 0..sites {
            let mut spinors = vec![*dir; sites];
            spinors[site] = flipped;
            raw.push(product_state(&spinors));
        }
    }
    raw
}

/// Product states aligned along ±x, ±y, ±z with at most one flipped site,
/// orthonormalized with deflation.
pub fn seeds_product_states(sites: usize, prec: Precision) -> Result<SeedFamily> {
    check_sites(sites)?;
    let raw = raw_product_states(sites)
        .iter()
        .map(|s| {
            let mut v = HVector::from_complex(s, prec);
            v.normalize();
            v
        })
        .collect();
    orthonormalize(raw, SeedKind::ProductStates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hiprec::orthogonality_drift;
    use crate::models::enumerate_fock;

    fn p() -> Precision {
        Precision::new(128).unwrap()
    }

    fn drift(f: &SeedFamily) -> f64 {
        orthogonality_drift(&f.vectors.iter().collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_site_spins_are_orthonormal() {
        let f = seeds_single_site_spins(4, SpinConvention::Pauli, p()).unwrap();
        assert_eq!(f.m(), 12);
        assert!(drift(&f) <= p().reorth_threshold());
        let g = seeds_single_site_spins(3, SpinConvention::Half, p()).unwrap();
        // Entries of a unit-norm Pauli string on 3 sites have magnitude 1/sqrt(8).
        let x0 = g.vectors[0].to_complex64();
        assert!((x0[4].re - 1.0 / 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_site_spins_are_traceless_and_hermitian() {
        let f = seeds_single_site_spins(3, SpinConvention::Pauli, p()).unwrap();
        for v in &f.vectors {
            let x = v.to_complex64();
            let tr: Complex64 = (0..8).map(|i| x[i * 9]).sum();
            assert!(tr.norm() < 1e-15);
            for i in 0..8 {
                for j in 0..8 {
                    assert_eq!(x[i * 8 + j], x[j * 8 + i].conj());
                }
            }
        }
    }

    #[test]
    fn zero_body_sizes() {
        assert_eq!(
            seeds_zero_body(&enumerate_fock(2, 2).unwrap(), p())
                .unwrap()
                .m(),
            2
        );
        let f = seeds_zero_body(&enumerate_fock(9, 9).unwrap(), p()).unwrap();
        assert_eq!(f.m(), 30);
        assert!(drift(&f) == 0.0);
    }

    #[test]
    fn number_operators_deflate() {
        let f = seeds_number_operators(&enumerate_fock(1, 2).unwrap(), p()).unwrap();
        assert_eq!(f.m(), 1);
        assert_eq!(f.deflated, vec![0, 1]);
        let f = seeds_number_operators(&enumerate_fock(2, 2).unwrap(), p()).unwrap();
        assert_eq!(f.m(), 2);
        assert_eq!(f.deflated, vec![2]);
        assert_eq!(f.requested - f.m(), f.deflated.len());
        assert!(drift(&f) <= p().reorth_threshold());
    }

    #[test]
    fn product_state_overlaps() {
        let raw = raw_product_states(3);
        assert_eq!(raw.len(), 24);
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
        };
        let norm = |a: &[Complex64]| dot(a, a).re.sqrt();
        assert_eq!(dot(&raw[0], &raw[1]).norm(), 0.0);
        let ov = dot(&raw[0], &raw[2]).norm() / (norm(&raw[0]) * norm(&raw[2]));
        assert!((ov - 0.5f64.sqrt().powi(3)).abs() < 1e-15);
    }

    #[test]
    fn product_states_span_full_space_at_three_sites() {
        let f = seeds_product_states(3, p()).unwrap();
        assert_eq!(f.requested, 24);
        assert_eq!(f.m(), 8);
        assert!(drift(&f) <= p().reorth_threshold());
        let f = seeds_product_states(4, p()).unwrap();
        assert_eq!(f.m(), 14);
    }

    #[test]
    fn dependent_member_does_not_grow_family() {
        let a = HVector::from_real(&[1.0, 0.0, 0.0], p());
        let b = HVector::from_real(&[1.0, 1.0, 0.0], p());
        let c = HVector::from_real(&[2.0, 1.0, 0.0], p());
        let two = orthonormalize(vec![a.clone(), b.clone()], SeedKind::SingleOperator).unwrap();
        let three = orthonormalize(vec![a, b, c], SeedKind::SingleOperator).unwrap();
        assert_eq!(two.m(), three.m());
        assert_eq!(three.deflated, vec![2]);
    }
}
