use rug::Float;

use super::{
    reorthogonalize, DriftRecord, DriftTracker, LanczosOptions, LinearOperator, ReorthDecision,
};
use crate::error::{Error, Result};
use crate::hiprec::{orthogonalize_against, HVector};

/// Output of the three-term recurrence from one seed.
#[derive(Clone, Debug)]
pub struct LanczosRun {
    pub basis: Vec<HVector>,
    /// `a[j] = <O_j, L O_j>`.
    pub a: Vec<Float>,
    /// `b[j]` couples `basis[j]` and `basis[j + 1]`; length `K - 1`.
    pub b: Vec<Float>,
    pub drift_log: Vec<DriftRecord>,
    /// Largest `||L O_j||` observed.
    pub norm_estimate: f64,
}

impl LanczosRun {
    /// Krylov dimension `K`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(Float::to_f64).collect()
    }

    pub fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(Float::to_f64).collect()
    }
}

/// Single-seed Lanczos. The seed must have unit norm to within `sqrt(eps)`
/// and is renormalized at working precision.
pub fn lanczos(
    op: &dyn LinearOperator,
    seed: &HVector,
    opts: &LanczosOptions,
) -> Result<LanczosRun> {
    let prec = opts.precision;
    let thr = prec.reorth_threshold();
    if seed.len() != op.dim() {
        return Err(Error::Dimension {
            expected: op.dim(),
            found: seed.len(),
        });
    }
    let mut seed = seed.with_precision(prec);
    let norm = seed.normalize().to_f64();
    if (norm - 1.0).abs() > thr {
        return Err(Error::Contract(format!(
            "Lanczos seed must be normalized, has norm {norm}"
        )));
    }

    let mut basis = vec![seed];
    let mut a = Vec::new();
    let mut b: Vec<Float> = Vec::new();
    let mut drift_log = Vec::new();
    let mut tracker = DriftTracker::new(prec.epsilon(), op.dim());
    let mut norm_est = 0.0f64;

    loop {
        let j = basis.len() - 1;
        let w = op.apply(&basis[j])?;
        norm_est = norm_est.max(w.norm().to_f64());
        let local: Vec<&HVector> = basis[j.saturating_sub(1)..].iter().collect();
        let (mut r, coeffs) = orthogonalize_against(&w, &local, 2)?;
        a.push(coeffs.last().expect("level is non-empty").re.clone());

        let mut nu = r.norm();
        if nu.to_f64() <= thr.sqrt() * norm_est && j >= 2 {
            let old: Vec<&HVector> = basis[..j - 1].iter().collect();
            r = orthogonalize_against(&r, &old, 2)?.0;
            nu = r.norm();
        }
        if nu.to_f64() <= thr * norm_est || opts.max_levels.is_some_and(|m| basis.len() >= m) {
            break;
        }
        let inv = Float::with_val(prec.bits(), 1) / &nu;
        r.scale_real(&inv);
        let nu_f = nu.to_f64();
        let a_norm = a[j].to_f64().abs();
        let estimate = tracker.advance(a_norm, nu_f, nu_f, norm_est);
        let decision = opts.decide(estimate);
        b.push(nu);
        basis.push(r);

        let full = decision == ReorthDecision::Full && j >= 1;
        if full {
            let (old, latest) = basis.split_at_mut(j);
            let mut cur = vec![latest[0].clone()];
            let mut new = vec![latest[1].clone()];
            let refs: Vec<&HVector> = old.iter().collect();
            reorthogonalize(&mut [&mut cur, &mut new], &refs, None)?;
            latest[0] = cur.pop().expect("one vector");
            latest[1] = new.pop().expect("one vector");
            tracker.reset_latest();
        }
        drift_log.push(DriftRecord {
            level: j + 1,
            estimate,
            reorthogonalized: full,
        });
        if basis.len() > op.dim() {
            return Err(Error::Contract(
                "Lanczos basis exceeded the space dimension; orthogonality was lost".into(),
            ));
        }
    }

    Ok(LanczosRun {
        basis,
        a,
        b,
        drift_log,
        norm_estimate: norm_est,
    })
}
