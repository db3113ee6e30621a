//! Hamiltonian families, their operator-space dynamics, and spectra.

mod liouvillian;
mod qrs;
mod spectral;
mod spin;

pub use liouvillian::{liouvillian_apply, HamiltonianAction, Liouvillian};
pub use qrs::{build_qrs, enumerate_fock, Couplings, FockBlock, QrsCoupling};
pub use spectral::{cluster_values, spectral, Cluster, SpectralDecomposition};
pub use spin::{build_ising, build_xyz, pauli_string_matrix, site_operator, Axis, SpinConvention};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hiprec::HMatrix;

/// A concrete Hamiltonian instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `H = -Σ_j [S_z S_z + h_x S_x + h_z S_z]`, periodic.
    Ising {
        sites: usize,
        h_x: f64,
        h_z: f64,
        #[serde(default)]
        spin_convention: SpinConvention,
    },
    /// `H = Σ_j [J_x S_x S_x + J_y S_y S_y + J_z S_z S_z - h_z S_z]`, periodic.
    Xyz {
        sites: usize,
        j_x: f64,
        j_y: f64,
        j_z: f64,
        h_z: f64,
        #[serde(default)]
        spin_convention: SpinConvention,
    },
    /// Quantum resonant system restricted to one `(N, M)` block.
    Qrs {
        particles: usize,
        quanta: usize,
        coupling: QrsCoupling,
        #[serde(default)]
        rng_seed: u64,
    },
}

impl ModelSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            ModelSpec::Ising { .. } => "ising",
            ModelSpec::Xyz { .. } => "xyz",
            ModelSpec::Qrs { .. } => "qrs",
        }
    }

    /// `L` for chains, `N` for resonant systems (the figures use `N = M`).
    pub fn size_label(&self) -> usize {
        match *self {
            ModelSpec::Ising { sites, .. } | ModelSpec::Xyz { sites, .. } => sites,
            ModelSpec::Qrs { particles, .. } => particles,
        }
    }

    pub fn is_chain(&self) -> bool {
        !matches!(self, ModelSpec::Qrs { .. })
    }

    pub fn fock_block(&self) -> Option<Result<FockBlock>> {
        match *self {
            ModelSpec::Qrs {
                particles, quanta, ..
            } => Some(enumerate_fock(particles, quanta)),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<HMatrix> {
        match *self {
            ModelSpec::Ising {
                sites,
                h_x,
                h_z,
                spin_convention,
            } => build_ising(sites, h_x, h_z, spin_convention),
            ModelSpec::Xyz {
                sites,
                j_x,
                j_y,
                j_z,
                h_z,
                spin_convention,
            } => build_xyz(sites, j_x, j_y, j_z, h_z, spin_convention),
            ModelSpec::Qrs {
                particles,
                quanta,
                coupling,
                rng_seed,
            } => build_qrs(&enumerate_fock(particles, quanta)?, coupling, rng_seed),
        }
    }

    /// Same model with a different coupling realization; chains are unchanged.
    pub fn with_rng_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        if let ModelSpec::Qrs { rng_seed, .. } = &mut out {
            *rng_seed = seed;
        }
        out
    }
}
