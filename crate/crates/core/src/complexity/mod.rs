//! Complexity time series, closed-form plateaus and their normalization.
//!
//! Everything here runs in `f64`: Krylov bases are rounded to standard
//! precision and moved to the Hamiltonian eigenframe, where time evolution is
//! diagonal.

mod frame;

pub use frame::EigenFrame;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::BlockKrylovBasis;
use crate::models::SpectralDecomposition;
use crate::seeds::GradedBasis;

/// Default averaging window of the oracle in units of the inverse minimum gap.
pub const ORACLE_WINDOW_FACTOR: f64 = 200.0;
pub const ORACLE_SAMPLES: usize = 4000;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest drift estimate logged by the Lanczos run.
    pub drift_estimate: f64,
    /// Measured orthogonality drift of the final basis, when computed.
    pub measured_drift: Option<f64>,
    pub widths: Vec<usize>,
    pub reorthogonalizations: usize,
    pub cluster_count: usize,
    pub norm_estimate: f64,
}

impl Diagnostics {
    pub fn from_basis(basis: &BlockKrylovBasis, cluster_count: usize) -> Self {
        Self {
            drift_estimate: basis
                .drift_log
                .iter()
                .map(|r| r.estimate)
                .fold(0.0, f64::max),
            measured_drift: None,
            widths: basis.widths(),
            reorthogonalizations: basis.reorthogonalizations(),
            cluster_count,
            norm_estimate: basis.norm_estimate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauResult {
    /// Seed-averaged all-time average.
    pub value: f64,
    /// Number of levels `M`; for size plateaus, highest grade plus one.
    pub levels: usize,
    /// `value / (levels - 1)` until a shared denominator is applied.
    pub normalized: f64,
    pub per_seed: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl PlateauResult {
    fn from_per_seed(per_seed: Vec<f64>, levels: usize, diagnostics: Diagnostics) -> Self {
        let value = per_seed.iter().sum::<f64>() / per_seed.len().max(1) as f64;
        let normalized = if levels > 1 {
            value / (levels - 1) as f64
        } else {
            0.0
        };
        Self {
            value,
            levels,
            normalized,
            per_seed,
            diagnostics,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Dimension {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, values })
    }
}

/// `φ_{J,k}^{(n)}(t) = <O_{J,k}| e^{iLt} |O_{0,n}>` for every basis member.
pub fn phi_coefficients(
    spec: &SpectralDecomposition,
    basis: &BlockKrylovBasis,
    seed: usize,
    t: f64,
) -> Result<Vec<Complex64>> {
    EigenFrame::operator(spec, basis)?.phi(seed, t)
}

pub fn c_mult_timeseries(
    spec: &SpectralDecomposition,
    basis: &BlockKrylovBasis,
    times: &[f64],
) -> Result<TimeSeries> {
    let frame = EigenFrame::operator(spec, basis)?;
    TimeSeries::new(times.to_vec(), frame.series_on_grid(times)?)
}

pub fn plateau_operator(
    spec: &SpectralDecomposition,
    basis: &BlockKrylovBasis,
) -> Result<PlateauResult> {
    let frame = EigenFrame::operator(spec, basis)?;
    Ok(PlateauResult::from_per_seed(
        frame.plateau_per_seed(),
        basis.level_count(),
        Diagnostics::from_basis(basis, frame.cluster_count()),
    ))
}

pub fn plateau_state(
    spec: &SpectralDecomposition,
    basis: &BlockKrylovBasis,
) -> Result<PlateauResult> {
    let frame = EigenFrame::state(spec, basis)?;
    Ok(PlateauResult::from_per_seed(
        frame.plateau_per_seed(),
        basis.level_count(),
        Diagnostics::from_basis(basis, frame.cluster_count()),
    ))
}

pub fn size_timeseries(
    spec: &SpectralDecomposition,
    graded: &GradedBasis,
    simple: &[usize],
    times: &[f64],
) -> Result<TimeSeries> {
    let frame = EigenFrame::size(spec, graded, simple)?;
    TimeSeries::new(times.to_vec(), frame.series_on_grid(times)?)
}

/// Size plateau averaged over `simple`; `levels` is the highest grade plus
/// one so that `normalized` divides by the highest grade.
pub fn plateau_size(
    spec: &SpectralDecomposition,
    graded: &GradedBasis,
    simple: &[usize],
) -> Result<PlateauResult> {
    let frame = EigenFrame::size(spec, graded, simple)?;
    let diagnostics = Diagnostics {
        cluster_count: frame.cluster_count(),
        ..Diagnostics::default()
    };
    Ok(PlateauResult::from_per_seed(
        frame.plateau_per_seed(),
        graded.max_grade() + 1,
        diagnostics,
    ))
}

/// Default oracle window `200 / gap` for the smallest gap between
/// neighbouring frequency clusters; `1` when there is a single cluster.
pub fn default_oracle_window(frame: &EigenFrame) -> f64 {
    match frame.min_gap() {
        Some(g) if g > 0.0 => ORACLE_WINDOW_FACTOR / g,
        _ => 1.0,
    }
}

/// Brute-force time average of the operator complexity on `[0, t_max]`.
pub fn time_average_oracle(
    spec: &SpectralDecomposition,
    basis: &BlockKrylovBasis,
    t_max: f64,
    samples: usize,
) -> Result<f64> {
    EigenFrame::operator(spec, basis)?.time_average(t_max, samples)
}

/// Divides both plateaus by `max(M_int, M_cha) - 1`.
pub fn normalize_pair(
    value_int: f64,
    m_int: usize,
    value_cha: f64,
    m_cha: usize,
) -> Result<(f64, f64)> {
    if value_int < 0.0 || value_cha < 0.0 || !value_int.is_finite() || !value_cha.is_finite() {
        return Err(Error::Parameter(format!(
            "plateaus must be non-negative, got {value_int} and {value_cha}"
        )));
    }
    if m_int == 0 || m_cha == 0 {
        return Err(Error::Parameter("level counts must be at least 1".into()));
    }
    let m = m_int.max(m_cha);
    if m == 1 {
        if value_int != 0.0 || value_cha != 0.0 {
            return Err(Error::Contract(
                "a single-level basis must have a zero plateau".into(),
            ));
        }
        return Ok((0.0, 0.0));
    }
    let denom = (m - 1) as f64;
    Ok((value_int / denom, value_cha / denom))
}

/// Mean and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub count: usize,
    pub mean: f64,
    pub std_error: f64,
}

impl EnsembleStats {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("empty ensemble".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_error = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            count: values.len(),
            mean,
            std_error,
        })
    }
}

/// Single-seed plateau `Σ_j j |<j|e^{iTt}|0>|²` averaged over all time,
/// computed from the Lanczos coefficients alone. With positive `b` the
/// tridiagonal matrix has a simple spectrum, so the average is
/// `Σ_j j Σ_k U_{jk}² U_{0k}²`.
pub fn plateau_from_tridiagonal(a: &[f64], b: &[f64]) -> Result<f64> {
    let k = a.len();
    if k == 0 || b.len() + 1 != k {
        return Err(Error::Dimension {
            expected: k.saturating_sub(1),
            found: b.len(),
        });
    }
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            a[i]
        } else if i.abs_diff(j) == 1 {
            b[i.min(j)]
        } else {
            0.0
        }
    });
    let u = SymmetricEigen::new(t).eigenvectors;
    let mut total = 0.0;
    for j in 1..k {
        for e in 0..k {
            total += j as f64 * (u[(j, e)] * u[(0, e)]).powi(2);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_pair_examples() {
        let (a, b) = normalize_pair(3.0, 7, 4.2, 7).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.7).abs() < 1e-15);
        assert_eq!(normalize_pair(0.0, 1, 0.0, 1).unwrap(), (0.0, 0.0));
        assert!(normalize_pair(-1.0, 3, 0.0, 3).is_err());
        assert!(normalize_pair(1.0, 1, 0.0, 1).is_err());
        let (a, b) = normalize_pair(2.0, 3, 2.0, 5).unwrap();
        assert_eq!((a, b), (0.5, 0.5));
    }

    #[test]
    fn ensemble_stats() {
        let s = EnsembleStats::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(EnsembleStats::from_values(&[7.0]).unwrap().std_error, 0.0);
        assert!(EnsembleStats::from_values(&[]).is_err());
    }

    #[test]
    fn two_level_tridiagonal() {
        let p = plateau_from_tridiagonal(&[0.0, 0.0], &[2.0]).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(plateau_from_tridiagonal(&[0.0], &[]).unwrap(), 0.0);
    }

    #[test]
    fn time_series_validation() {
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(TimeSeries::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }
}
