use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::Float;

use super::{
    reorthogonalize, DriftRecord, DriftTracker, LanczosOptions, LinearOperator, ReorthDecision,
};
use crate::error::{Error, Result};
use crate::hiprec::{orthogonality_drift, orthogonalize_against, HComplex, HVector, Precision};

/// Dense row-major block of recurrence coefficients at working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientBlock {
    rows: usize,
    cols: usize,
    data: Vec<HComplex>,
}

impl CoefficientBlock {
    pub fn zeros(rows: usize, cols: usize, prec: Precision) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| HComplex::zero(prec)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &HComplex {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: HComplex) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr().to_f64())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(HComplex::abs_f64).fold(0.0, f64::max)
    }

    /// Smallest singular value, evaluated in `f64`.
    pub fn sigma_min(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.to_dmatrix()
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Levels `Ω_0 .. Ω_{M-1}` of a block Krylov basis with the block-tridiagonal
/// coefficients `A_J = Ω_J† L Ω_J` and `B_{J+1} = Ω_{J+1}† L Ω_J`.
#[derive(Clone, Debug)]
pub struct BlockKrylovBasis {
    pub levels: Vec<Vec<HVector>>,
    pub a_blocks: Vec<CoefficientBlock>,
    /// `b_blocks[J]` is `B_{J+1}` (`p_{J+1} x p_J`).
    pub b_blocks: Vec<CoefficientBlock>,
    pub drift_log: Vec<DriftRecord>,
    /// Candidates discarded at each level as linearly dependent.
    pub deflated: Vec<usize>,
    pub norm_estimate: f64,
    pub precision: Precision,
}

impl BlockKrylovBasis {
    /// Widths `p_J`.
    pub fn widths(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Number of levels `M`.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn total_len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn seed_count(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// `(level, vector)` pairs in basis order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &HVector)> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(j, level)| level.iter().map(move |v| (j, v)))
    }

    pub fn reorthogonalizations(&self) -> usize {
        self.drift_log.iter().filter(|r| r.reorthogonalized).count()
    }

    /// Measured deviation of the whole basis from orthonormality. Costs
    /// `O(N^2 D)` at working precision.
    pub fn measured_drift(&self) -> Result<f64> {
        let all: Vec<&HVector> = self.iter().map(|(_, v)| v).collect();
        orthogonality_drift(&all)
    }

    /// `max |<O_{I,i}, L O_{J,j}>|` over `|I - J| >= 2`.
    pub fn tridiagonality_residual(&self, op: &dyn LinearOperator) -> Result<f64> {
        let mut worst = 0.0f64;
        for (j, level) in self.levels.iter().enumerate() {
            for v in level {
                let lv = op.apply(v)?;
                for (i, other) in self.levels.iter().enumerate() {
                    if i.abs_diff(j) < 2 {
                        continue;
                    }
                    for u in other {
                        worst = worst.max(u.inner(&lv)?.abs_f64());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Block Lanczos from an orthonormal seed family.
///
/// Level `J + 1` is built by applying `L` to every member of level `J` in
/// order, orthogonalizing against levels `J - 1`, `J` and the members of
/// `J + 1` accepted so far, and discarding candidates whose residual norm is
/// at most `sqrt(eps) ||L||_est`. A candidate whose local residual falls
/// below `eps^(1/4) ||L||_est` is first orthogonalized against the whole
/// basis. Accepted members are normalized with the phase convention of
/// [`HVector::canonicalize_phase`]. The run terminates when a level comes out
/// empty.
pub fn block_lanczos(
    op: &dyn LinearOperator,
    seeds: &[HVector],
    opts: &LanczosOptions,
) -> Result<BlockKrylovBasis> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let prec = opts.precision;
    let thr = prec.reorth_threshold();
    let dim = op.dim();
    let mut level0 = Vec::with_capacity(seeds.len());
    for s in seeds {
        if s.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: s.len(),
            });
        }
        let mut v = s.with_precision(prec);
        v.canonicalize_phase(thr);
        level0.push(v);
    }
    let drift = orthogonality_drift(&level0.iter().collect::<Vec<_>>())?;
    if drift > thr {
        return Err(Error::Contract(format!(
            "seed family is not orthonormal (drift {drift:e})"
        )));
    }

    let mut levels = vec![level0];
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    let mut drift_log = Vec::new();
    let mut deflated = vec![0];
    let mut tracker = DriftTracker::new(prec.epsilon(), dim);
    let mut norm_est = 0.0f64;

    loop {
        let j = levels.len() - 1;
        let images = levels[j]
            .iter()
            .map(|v| op.apply(v))
            .collect::<Result<Vec<_>>>()?;
        for w in &images {
            norm_est = norm_est.max(w.norm().to_f64());
        }
        let tau = thr * norm_est;
        let screen = thr.sqrt();
        let p_prev = if j > 0 { levels[j - 1].len() } else { 0 };
        let p_cur = levels[j].len();

        let mut a = CoefficientBlock::zeros(p_cur, p_cur, prec);
        let mut columns: Vec<Vec<HComplex>> = Vec::with_capacity(p_cur);
        let mut next: Vec<HVector> = Vec::new();
        let mut dropped = 0;
        for (k, w) in images.iter().enumerate() {
            let refs: Vec<&HVector> = levels[j.saturating_sub(1)..]
                .iter()
                .flatten()
                .chain(next.iter())
                .collect();
            let (mut r, coeffs) = orthogonalize_against(w, &refs, 2)?;
            let mut coeffs = coeffs.into_iter().skip(if j > 0 { p_prev } else { 0 });
            for i in 0..p_cur {
                a.set(i, k, coeffs.next().expect("one coefficient per vector"));
            }
            let mut col: Vec<HComplex> = coeffs.collect();
            let mut nu = r.norm();
            if nu.to_f64() <= screen * norm_est && j >= 2 {
                let old: Vec<&HVector> = levels[..j - 1].iter().flatten().collect();
                r = orthogonalize_against(&r, &old, 2)?.0;
                nu = r.norm();
            }
            if nu.to_f64() > tau {
                let inv = Float::with_val(prec.bits(), 1) / &nu;
                r.scale_real(&inv);
                let phase = r.canonicalize_phase(thr);
                let mut coupling = phase.conj();
                coupling.scale_real(&nu);
                col.push(coupling);
                next.push(r);
            } else {
                dropped += 1;
            }
            columns.push(col);
        }
        a_blocks.push(a);

        let stop = next.is_empty() || opts.max_levels.is_some_and(|m| levels.len() >= m);
        if stop {
            break;
        }

        let mut b = CoefficientBlock::zeros(next.len(), p_cur, prec);
        for (k, col) in columns.into_iter().enumerate() {
            for (i, c) in col.into_iter().enumerate() {
                b.set(i, k, c);
            }
        }
        let estimate = tracker.advance(
            a_blocks[j].frobenius(),
            b.frobenius(),
            b.sigma_min(),
            norm_est,
        );
        b_blocks.push(b);
        deflated.push(dropped);

        let full = opts.decide(estimate) == ReorthDecision::Full && j >= 1;
        if full {
            let (old, latest) = levels.split_at_mut(j);
            let refs: Vec<&HVector> = old.iter().flatten().collect();
            reorthogonalize(&mut [&mut latest[0], &mut next], &refs, Some(thr))?;
            tracker.reset_latest();
        }
        drift_log.push(DriftRecord {
            level: j + 1,
            estimate,
            reorthogonalized: full,
        });
        levels.push(next);

        if levels.iter().map(Vec::len).sum::<usize>() > dim {
            return Err(Error::Contract(
                "block Krylov basis exceeded the space dimension; orthogonality was lost".into(),
            ));
        }
    }

    Ok(BlockKrylovBasis {
        levels,
        a_blocks,
        b_blocks,
        drift_log,
        deflated,
        norm_estimate: norm_est,
        precision: prec,
    })
}
