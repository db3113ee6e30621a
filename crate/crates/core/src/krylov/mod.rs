//! Single-seed and block Lanczos with deflation and partial
//! reorthogonalization.
//!
//! Both recurrences orthogonalize each new candidate against the previous two
//! levels with two passes of classical Gram–Schmidt. A norm-based estimate of
//! the accumulated loss of orthogonality against older levels
//! ([`DriftTracker`]) decides when the latest two levels are reorthogonalized
//! against the whole basis.

mod block;
mod drift;
mod lanczos;

pub use block::{block_lanczos, BlockKrylovBasis, CoefficientBlock};
pub use drift::{DriftRecord, DriftTracker};
pub use lanczos::{lanczos, LanczosRun};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hiprec::{HVector, Precision};

/// A Hermitian linear map applied at working precision.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &HVector) -> Result<HVector>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReorthPolicy {
    /// Local recurrence plus full reorthogonalization when the drift estimate
    /// crosses `sqrt(eps)`.
    #[default]
    Partial,
    /// Full reorthogonalization at every level.
    Full,
    /// Local recurrence only; orthogonality is allowed to decay.
    LocalOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReorthDecision {
    None,
    Local,
    Full,
}

/// Partial reorthogonalization trigger. `None` is never returned: local
/// orthogonalization is the floor.
pub fn reorth_policy_step(drift_estimate: f64, threshold: f64) -> ReorthDecision {
    if drift_estimate > threshold {
        ReorthDecision::Full
    } else {
        ReorthDecision::Local
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    pub precision: Precision,
    pub policy: ReorthPolicy,
    /// Stop after this many levels even if the recurrence has not terminated.
    pub max_levels: Option<usize>,
}

impl LanczosOptions {
    pub fn new(precision: Precision) -> Self {
        Self {
            precision,
            policy: ReorthPolicy::Partial,
            max_levels: None,
        }
    }

    pub fn with_policy(mut self, policy: ReorthPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_max_levels(mut self, levels: usize) -> Self {
        self.max_levels = Some(levels);
        self
    }

    fn decide(&self, estimate: f64) -> ReorthDecision {
        match self.policy {
            ReorthPolicy::Partial => {
                reorth_policy_step(estimate, self.precision.reorth_threshold())
            }
            ReorthPolicy::Full => ReorthDecision::Full,
            ReorthPolicy::LocalOnly => ReorthDecision::Local,
        }
    }
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self::new(Precision::default())
    }
}

/// Sweeps `targets` against `basis` and then against each other, in order,
/// with two passes and renormalizes. With `phase_threshold` set, the phase
/// convention is re-applied to every vector.
fn reorthogonalize(
    targets: &mut [&mut Vec<HVector>],
    basis: &[&HVector],
    phase_threshold: Option<f64>,
) -> Result<()> {
    let mut done: Vec<HVector> = Vec::new();
    for level in targets.iter_mut() {
        for v in level.iter_mut() {
            let refs: Vec<&HVector> = basis.iter().copied().chain(done.iter()).collect();
            let (mut r, _) = crate::hiprec::orthogonalize_against(v, &refs, 2)?;
            r.normalize();
            if let Some(t) = phase_threshold {
                r.canonicalize_phase(t);
            }
            *v = r;
            done.push(v.clone());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_step() {
        assert_eq!(reorth_policy_step(1e-20, 1e-19), ReorthDecision::Local);
        assert_eq!(
            reorth_policy_step(1.0000001e-19, 1e-19),
            ReorthDecision::Full
        );
        assert_eq!(reorth_policy_step(1e-19, 1e-19), ReorthDecision::Local);
    }

    #[test]
    fn policies_map_to_decisions() {
        let p = Precision::new(128).unwrap();
        let thr = p.reorth_threshold();
        let opts = LanczosOptions::new(p);
        assert_eq!(opts.decide(thr * 2.0), ReorthDecision::Full);
        assert_eq!(opts.decide(thr / 2.0), ReorthDecision::Local);
        let full = opts.with_policy(ReorthPolicy::Full);
        assert_eq!(full.decide(0.0), ReorthDecision::Full);
        let local = opts.with_policy(ReorthPolicy::LocalOnly);
        assert_eq!(local.decide(1.0), ReorthDecision::Local);
    }
}
