use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hiprec::{symmetric_eigen, HMatrix};

/// Relative tolerance applied to the spectral range when none is given.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-8;

/// Indices into a value list that are treated as one degenerate value.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Mean of the member values.
    pub value: f64,
    pub members: Vec<usize>,
}

/// Single-linkage clustering of `values` after sorting: neighbours closer
/// than `tol` share a cluster. Clusters come back in ascending order and
/// members inside a cluster in ascending index order.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<Cluster> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for idx in order {
        let v = values[idx];
        match clusters.last_mut() {
            Some(c) if v - last <= tol => c.members.push(idx),
            _ => clusters.push(Cluster {
                value: 0.0,
                members: vec![idx],
            }),
        }
        last = v;
    }
    for c in &mut clusters {
        c.members.sort_unstable();
        c.value = c.members.iter().map(|&i| values[i]).sum::<f64>() / c.members.len() as f64;
    }
    clusters
}

/// Eigenbasis of `H` with the derived Liouvillian frequencies.
///
/// Liouvillian eigenvector `α = i d + j` is `|E_i><E_j|` with frequency
/// `ω_α = E_i - E_j`, matching the row-major flattening of operators.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub energies: Vec<f64>,
    /// Columns are eigenvectors.
    pub vectors: DMatrix<Complex64>,
    pub frequencies: Vec<f64>,
    pub frequency_clusters: Vec<Cluster>,
    pub energy_clusters: Vec<Cluster>,
    pub cluster_tol: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn is_real(&self) -> bool {
        self.vectors.iter().all(|z| z.im == 0.0)
    }

    /// Width of the Liouvillian spectrum, `2 (E_max - E_min)`.
    pub fn frequency_range(&self) -> f64 {
        match (self.energies.first(), self.energies.last()) {
            (Some(lo), Some(hi)) => 2.0 * (hi - lo),
            _ => 0.0,
        }
    }

    /// Smallest distance between neighbouring cluster values, or `None`
    /// when there is a single cluster.
    pub fn min_gap(clusters: &[Cluster]) -> Option<f64> {
        clusters
            .windows(2)
            .map(|w| w[1].value - w[0].value)
            .min_by(f64::total_cmp)
    }

    /// `V† O V` for a row-major flattened operator.
    pub fn operator_to_eigenframe(&self, flat: &[Complex64]) -> Result<Vec<Complex64>> {
        let d = self.dim();
        if flat.len() != d * d {
            return Err(Error::Dimension {
                expected: d * d,
                found: flat.len(),
            });
        }
        if self.is_real() && flat.iter().all(|z| z.im == 0.0) {
            let v = self.vectors.map(|z| z.re);
            let o = DMatrix::from_row_iterator(d, d, flat.iter().map(|z| z.re));
            let x = v.transpose() * o * &v;
            return Ok(row_major(&x).map(|r| Complex64::new(r, 0.0)).collect());
        }
        let o = DMatrix::from_row_slice(d, d, flat);
        let x = self.vectors.adjoint() * o * &self.vectors;
        Ok(row_major(&x).collect())
    }

    /// `V† ψ` for a state.
    pub fn state_to_eigenframe(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let d = self.dim();
        if psi.len() != d {
            return Err(Error::Dimension {
                expected: d,
                found: psi.len(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(psi);
        Ok((self.vectors.adjoint() * v).iter().copied().collect())
    }
}

fn row_major<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> impl Iterator<Item = T> + '_ {
    let (r, c) = m.shape();
    (0..r * c).map(move |k| m[(k / c, k % c)])
}

/// Diagonalizes `H` and clusters its Liouvillian frequencies and energies.
///
/// The default tolerance is `1e-8` times the width of the Liouvillian
/// spectrum. Energies are clustered with the same absolute tolerance.
pub fn spectral(h: &HMatrix, cluster_tol: Option<f64>) -> Result<SpectralDecomposition> {
    let (energies, vectors) = symmetric_eigen(h)?;
    let d = energies.len();
    let range = match (energies.first(), energies.last()) {
        (Some(lo), Some(hi)) => 2.0 * (hi - lo),
        _ => 0.0,
    };
    let tol = match cluster_tol {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => return Err(Error::Parameter(format!("invalid cluster tolerance {t}"))),
        None => DEFAULT_RELATIVE_TOL * range,
    };
    let frequencies: Vec<f64> = (0..d * d)
        .map(|a| energies[a / d] - energies[a % d])
        .collect();
    let frequency_clusters = cluster_values(&frequencies, tol);
    let energy_clusters = cluster_values(&energies, tol);
    Ok(SpectralDecomposition {
        energies,
        vectors,
        frequencies,
        frequency_clusters,
        energy_clusters,
        cluster_tol: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> HMatrix {
        HMatrix::from_real(&DMatrix::from_diagonal(&DVector::from_column_slice(values))).unwrap()
    }

    fn cluster_at(s: &SpectralDecomposition, w: f64) -> &Cluster {
        s.frequency_clusters
            .iter()
            .find(|c| (c.value - w).abs() < 1e-12)
            .unwrap()
    }

    #[test]
    fn two_level_frequencies() {
        let s = spectral(&diag(&[0.0, 1.0]), None).unwrap();
        let mut w = s.frequencies.clone();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(cluster_at(&s, 0.0).members, vec![0, 3]);
        assert_eq!(s.frequency_clusters.len(), 3);
    }

    #[test]
    fn equally_spaced_levels_resonate() {
        let s = spectral(&diag(&[0.0, 1.0, 2.0]), None).unwrap();
        // (1,0) -> 3, (2,1) -> 7
        assert_eq!(cluster_at(&s, 1.0).members, vec![3, 7]);
        assert_eq!(cluster_at(&s, 0.0).members, vec![0, 4, 8]);
        assert_eq!(s.energy_clusters.len(), 3);
    }

    #[test]
    fn generic_spectrum_has_only_diagonal_zero_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DMatrix::from_fn(10, 10, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let h = HMatrix::hermitian((&a + a.adjoint()).map(|z| z * 0.5)).unwrap();
        let s = spectral(&h, Some(1e-8)).unwrap();
        let zero = cluster_at(&s, 0.0);
        assert_eq!(zero.members, (0..10).map(|i| i * 11).collect::<Vec<_>>());
        assert_eq!(s.frequency_clusters.len(), 100 - 10 + 1);
    }

    #[test]
    fn single_linkage_chains_neighbours() {
        let c = cluster_values(&[0.0, 0.6, 1.2, 5.0], 0.7);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].members, vec![0, 1, 2]);
        assert!((c[0].value - 0.6).abs() < 1e-15);
    }

    #[test]
    fn eigenframe_of_h_is_diagonal() {
        let h = diag(&[3.0, -1.0]);
        let s = spectral(&h, None).unwrap();
        let flat: Vec<Complex64> = h.as_dmatrix().transpose().iter().copied().collect();
        let x = s.operator_to_eigenframe(&flat).unwrap();
        assert_eq!(x[0].re, -1.0);
        assert_eq!(x[3].re, 3.0);
        assert!(x[1].norm() == 0.0 && x[2].norm() == 0.0);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = HMatrix::general(DMatrix::from_element(2, 2, Complex64::new(1.0, 1.0)));
        assert!(spectral(&m, None).is_err());
    }
}
