//! Named parameter points for the four model families.

use mskrylov::models::{ModelSpec, QrsCoupling, SpinConvention};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PresetKind {
    Ising {
        h_x: f64,
        h_z: f64,
    },
    Xyz {
        j_x: f64,
        j_y: f64,
        j_z: f64,
        h_z: f64,
    },
    Qrs(QrsCoupling),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub kind: PresetKind,
    pub integrable: bool,
    /// Preset on the other side of the integrable/chaotic pair.
    pub partner: &'static str,
    pub summary: &'static str,
}

pub const PRESETS: [Preset; 8] = [
    Preset {
        name: "ising-integrable",
        kind: PresetKind::Ising {
            h_x: -1.05,
            h_z: 0.0,
        },
        integrable: true,
        partner: "ising-chaotic",
        summary: "mixed-field Ising, (h_x, h_z) = (-1.05, 0)",
    },
    Preset {
        name: "ising-chaotic",
        kind: PresetKind::Ising {
            h_x: -1.05,
            h_z: 0.5,
        },
        integrable: false,
        partner: "ising-integrable",
        summary: "mixed-field Ising, (h_x, h_z) = (-1.05, 0.5)",
    },
    Preset {
        name: "xyz-integrable-small-jz",
        kind: PresetKind::Xyz {
            j_x: -0.35,
            j_y: 0.5,
            j_z: -0.1,
            h_z: 0.0,
        },
        integrable: true,
        partner: "xyz-chaotic-small-jz",
        summary: "XYZ, (J_x, J_y, J_z) = (-0.35, 0.5, -0.1), h_z = 0",
    },
    Preset {
        name: "xyz-integrable",
        kind: PresetKind::Xyz {
            j_x: -0.35,
            j_y: 0.5,
            j_z: -1.0,
            h_z: 0.0,
        },
        integrable: true,
        partner: "xyz-chaotic",
        summary: "XYZ, (J_x, J_y, J_z) = (-0.35, 0.5, -1), h_z = 0",
    },
    Preset {
        name: "xyz-chaotic",
        kind: PresetKind::Xyz {
            j_x: -0.35,
            j_y: 0.5,
            j_z: -1.0,
            h_z: 0.8,
        },
        integrable: false,
        partner: "xyz-integrable",
        summary: "XYZ, (J_x, J_y, J_z) = (-0.35, 0.5, -1), h_z = 0.8",
    },
    Preset {
        name: "xyz-chaotic-small-jz",
        kind: PresetKind::Xyz {
            j_x: -0.35,
            j_y: 0.5,
            j_z: -0.1,
            h_z: 0.8,
        },
        integrable: false,
        partner: "xyz-integrable-small-jz",
        summary: "XYZ, (J_x, J_y, J_z) = (-0.35, 0.5, -0.1), h_z = 0.8",
    },
    Preset {
        name: "qrs-integrable",
        kind: PresetKind::Qrs(QrsCoupling::Integrable),
        integrable: true,
        partner: "qrs-chaotic",
        summary: "resonant system, C = 1 when any index is 0",
    },
    Preset {
        name: "qrs-chaotic",
        kind: PresetKind::Qrs(QrsCoupling::Chaotic),
        integrable: false,
        partner: "qrs-integrable",
        summary: "resonant system, C ~ U(0, 1) per symmetry orbit",
    },
];

pub fn find(name: &str) -> CliResult<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

impl Preset {
    pub fn is_chain(&self) -> bool {
        !matches!(self.kind, PresetKind::Qrs(_))
    }

    /// Chains take `size = L`; resonant systems take `size = N = M`.
    pub fn model(&self, size: usize, convention: SpinConvention, rng_seed: u64) -> ModelSpec {
        match self.kind {
            PresetKind::Ising { h_x, h_z } => ModelSpec::Ising {
                sites: size,
                h_x,
                h_z,
                spin_convention: convention,
            },
            PresetKind::Xyz { j_x, j_y, j_z, h_z } => ModelSpec::Xyz {
                sites: size,
                j_x,
                j_y,
                j_z,
                h_z,
                spin_convention: convention,
            },
            PresetKind::Qrs(coupling) => ModelSpec::Qrs {
                particles: size,
                quanta: size,
                coupling,
                rng_seed,
            },
        }
    }
}
