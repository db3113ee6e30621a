use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hiprec::HMatrix;

/// Normalization of the spin operators: `S = σ` or `S = σ/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinConvention {
    #[default]
    Pauli,
    Half,
}

impl SpinConvention {
    pub fn factor(self) -> f64 {
        match self {
            SpinConvention::Pauli => 1.0,
            SpinConvention::Half => 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// `σ_a |b> = phase |b ^ flip>` for a single spin in state `b` (0 = up).
    fn act(self, bit: usize) -> (usize, Complex64) {
        let z = if bit == 0 { 1.0 } else { -1.0 };
        match self {
            Axis::X => (1, Complex64::new(1.0, 0.0)),
            Axis::Y => (1, Complex64::new(0.0, z)),
            Axis::Z => (0, Complex64::new(z, 0.0)),
        }
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites < 3 {
        return Err(Error::Parameter(format!(
            "periodic chains need at least 3 sites, got {sites}"
        )));
    }
    if sites > 12 {
        return Err(Error::Parameter(format!(
            "dense operator space for {sites} sites is out of reach"
        )));
    }
    Ok(())
}

/// Bit of `site` in basis index `b`; site 0 is the leftmost tensor factor.
fn bit(b: usize, site: usize, sites: usize) -> usize {
    (b >> (sites - 1 - site)) & 1
}

fn z_sign(b: usize, site: usize, sites: usize) -> f64 {
    if bit(b, site, sites) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn mask(site: usize, sites: usize) -> usize {
    1 << (sites - 1 - site)
}

pub fn build_ising(
    sites: usize,
    h_x: f64,
    h_z: f64,
    convention: SpinConvention,
) -> Result<HMatrix> {
    check_sites(sites)?;
    let c = convention.factor();
    let d = 1usize << sites;
    let mut h = DMatrix::<f64>::zeros(d, d);
    for b in 0..d {
        let mut diag = 0.0;
        for j in 0..sites {
            let k = (j + 1) % sites;
            let (zj, zk) = (z_sign(b, j, sites), z_sign(b, k, sites));
            diag -= c * c * zj * zk + h_z * c * zj;
            h[(b ^ mask(j, sites), b)] -= h_x * c;
        }
        h[(b, b)] += diag;
    }
    HMatrix::from_real(&h)
}

pub fn build_xyz(
    sites: usize,
    j_x: f64,
    j_y: f64,
    j_z: f64,
    h_z: f64,
    convention: SpinConvention,
) -> Result<HMatrix> {
    check_sites(sites)?;
    let c = convention.factor();
    let d = 1usize << sites;
    let mut h = DMatrix::<f64>::zeros(d, d);
    for b in 0..d {
        let mut diag = 0.0;
        for j in 0..sites {
            let k = (j + 1) % sites;
            let (zj, zk) = (z_sign(b, j, sites), z_sign(b, k, sites));
            diag += c * c * j_z * zj * zk - h_z * c * zj;
            // σxσx flips both spins with amplitude 1; σyσy with -z_j z_k.
            let flipped = b ^ mask(j, sites) ^ mask(k, sites);
            h[(flipped, b)] += c * c * (j_x - j_y * zj * zk);
        }
        h[(b, b)] += diag;
    }
    HMatrix::from_real(&h)
}

/// Dense `σ_{a_1} ⊗ ... ⊗ σ_{a_L}` with `None` for identity factors.
pub fn pauli_string_matrix(axes: &[Option<Axis>]) -> DMatrix<Complex64> {
    let sites = axes.len();
    let d = 1usize << sites;
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d {
        let mut target = b;
        let mut amp = Complex64::new(1.0, 0.0);
        for (site, axis) in axes.iter().enumerate() {
            if let Some(axis) = axis {
                let (flip, phase) = axis.act(bit(b, site, sites));
                if flip == 1 {
                    target ^= mask(site, sites);
                }
                amp *= phase;
            }
        }
        m[(target, b)] = amp;
    }
    m
}

/// `S_a` acting on one site of an `sites`-site chain.
pub fn site_operator(
    sites: usize,
    site: usize,
    axis: Axis,
    convention: SpinConvention,
) -> DMatrix<Complex64> {
    let mut axes = vec![None; sites];
    axes[site] = Some(axis);
    pauli_string_matrix(&axes).map(|z| z * convention.factor())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hiprec::symmetric_eigen;

    fn pauli(axis: Axis) -> DMatrix<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match axis {
            Axis::X => DMatrix::from_row_slice(2, 2, &[o, one, one, o]),
            Axis::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Axis::Z => DMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
        }
    }

    /// Kronecker-product construction, independent of the bit tricks above.
    fn kron_site(sites: usize, site: usize, axis: Axis, c: f64) -> DMatrix<Complex64> {
        let mut out = DMatrix::<Complex64>::identity(1, 1);
        for s in 0..sites {
            let f = if s == site {
                pauli(axis).map(|z| z * c)
            } else {
                DMatrix::identity(2, 2)
            };
            out = out.kronecker(&f);
        }
        out
    }

    fn kron_ising(sites: usize, h_x: f64, h_z: f64, c: f64) -> DMatrix<Complex64> {
        let d = 1 << sites;
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for j in 0..sites {
            let k = (j + 1) % sites;
            h -= kron_site(sites, j, Axis::Z, c) * kron_site(sites, k, Axis::Z, c);
            h -= kron_site(sites, j, Axis::X, c) * Complex64::new(h_x, 0.0);
            h -= kron_site(sites, j, Axis::Z, c) * Complex64::new(h_z, 0.0);
        }
        h
    }

    fn kron_xyz(sites: usize, j: [f64; 3], h_z: f64, c: f64) -> DMatrix<Complex64> {
        let d = 1 << sites;
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for s in 0..sites {
            let k = (s + 1) % sites;
            for (axis, coupling) in Axis::ALL.iter().zip(j) {
                h += kron_site(sites, s, *axis, c)
                    * kron_site(sites, k, *axis, c)
                    * Complex64::new(coupling, 0.0);
            }
            h -= kron_site(sites, s, Axis::Z, c) * Complex64::new(h_z, 0.0);
        }
        h
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a * b - b * a
    }

    fn total_sz(sites: usize) -> DMatrix<Complex64> {
        let d = 1 << sites;
        (0..sites).fold(DMatrix::zeros(d, d), |acc, s| {
            acc + kron_site(sites, s, Axis::Z, 1.0)
        })
    }

    #[test]
    fn too_short_chain() {
        assert!(build_ising(2, 1.0, 0.0, SpinConvention::Pauli).is_err());
        assert!(build_xyz(2, 1.0, 1.0, 1.0, 0.0, SpinConvention::Pauli).is_err());
    }

    #[test]
    fn classical_ising_is_diagonal_and_traceless() {
        let h = build_ising(3, 0.0, 0.0, SpinConvention::Pauli).unwrap();
        let m = h.as_dmatrix();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(m[(i, j)].norm(), 0.0);
                }
            }
        }
        assert_eq!(h.trace().norm(), 0.0);
    }

    #[test]
    fn ising_matches_kronecker_construction() {
        for (sites, conv) in [
            (3, SpinConvention::Pauli),
            (4, SpinConvention::Pauli),
            (3, SpinConvention::Half),
        ] {
            let h = build_ising(sites, -1.05, 0.5, conv).unwrap();
            let oracle = kron_ising(sites, -1.05, 0.5, conv.factor());
            assert!(max_diff(h.as_dmatrix(), &oracle) < 1e-14);
            let (e1, _) = symmetric_eigen(&h).unwrap();
            let (e2, _) = symmetric_eigen(&HMatrix::hermitian(oracle).unwrap()).unwrap();
            for (a, b) in e1.iter().zip(&e2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn integrable_ising_preset_builds() {
        let h = build_ising(4, -1.05, 0.0, SpinConvention::Pauli).unwrap();
        assert_eq!(h.nrows(), 16);
        assert!(h.is_hermitian() && h.is_real());
    }

    #[test]
    fn xyz_matches_kronecker_construction() {
        for conv in [SpinConvention::Pauli, SpinConvention::Half] {
            let h = build_xyz(4, -0.35, 0.5, -1.0, 0.8, conv).unwrap();
            let oracle = kron_xyz(4, [-0.35, 0.5, -1.0], 0.8, conv.factor());
            assert!(max_diff(h.as_dmatrix(), &oracle) < 1e-14);
        }
    }

    #[test]
    fn heisenberg_conserves_total_sz() {
        let h = build_xyz(3, 1.0, 1.0, 1.0, 0.0, SpinConvention::Pauli).unwrap();
        let c = commutator(h.as_dmatrix(), &total_sz(3));
        assert!(c.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn anisotropic_xyz_keeps_only_spin_flip_parity() {
        let h = build_xyz(3, -0.35, 0.5, -1.0, 0.0, SpinConvention::Pauli).unwrap();
        let c = commutator(h.as_dmatrix(), &total_sz(3));
        assert!(c.iter().any(|z| z.norm() > 1e-3));
        let flip = pauli_string_matrix(&[Some(Axis::X); 3]);
        let c = commutator(h.as_dmatrix(), &flip);
        assert!(c.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn site_operators_match_kronecker() {
        for axis in Axis::ALL {
            for site in 0..3 {
                let a = site_operator(3, site, axis, SpinConvention::Pauli);
                assert!(max_diff(&a, &kron_site(3, site, axis, 1.0)) == 0.0);
            }
        }
    }
}
