use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krylov::BlockKrylovBasis;
use crate::models::{Cluster, SpectralDecomposition};
use crate::seeds::GradedBasis;

/// Seeds and weighted basis members in the Hamiltonian eigenframe.
///
/// Every quantity in this module is an overlap
/// `φ_b^{(n)}(t) = Σ_α conj(X_b[α]) e^{i ω_α t} S_n[α]`
/// between an evolving seed `S_n` and a fixed member `X_b` of weight `w_b`.
/// Plateaus follow from summing `conj(X_b) S_n` inside each degeneracy
/// cluster of `ω`.
#[derive(Clone, Debug)]
pub struct EigenFrame {
    frequencies: Vec<f64>,
    clusters: Vec<Cluster>,
    seeds: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
    members: Vec<Vec<Complex64>>,
    /// Largest weight any member can carry, used for normalization.
    max_weight: usize,
}

fn is_real(v: &[Complex64]) -> bool {
    v.iter().all(|z| z.im == 0.0)
}

impl EigenFrame {
    /// Operator Krylov basis: weights are level indices, seeds are level 0.
    pub fn operator(spec: &SpectralDecomposition, basis: &BlockKrylovBasis) -> Result<Self> {
        let mut weights = Vec::with_capacity(basis.total_len());
        let mut members = Vec::with_capacity(basis.total_len());
        for (j, v) in basis.iter() {
            weights.push(j as f64);
            members.push(spec.operator_to_eigenframe(&v.to_complex64())?);
        }
        let seeds = members[..basis.seed_count()].to_vec();
        Ok(Self {
            frequencies: spec.frequencies.clone(),
            clusters: spec.frequency_clusters.clone(),
            seeds,
            weights,
            members,
            max_weight: basis.level_count().saturating_sub(1),
        })
    }

    /// State Krylov basis evolved by `e^{-iHt}`: frequencies are `-E_i`.
    pub fn state(spec: &SpectralDecomposition, basis: &BlockKrylovBasis) -> Result<Self> {
        let mut weights = Vec::with_capacity(basis.total_len());
        let mut members = Vec::with_capacity(basis.total_len());
        for (j, v) in basis.iter() {
            weights.push(j as f64);
            members.push(spec.state_to_eigenframe(&v.to_complex64())?);
        }
        let seeds = members[..basis.seed_count()].to_vec();
        let frequencies: Vec<f64> = spec.energies.iter().map(|e| -e).collect();
        Ok(Self {
            frequencies,
            clusters: spec.energy_clusters.clone(),
            seeds,
            weights,
            members,
            max_weight: basis.level_count().saturating_sub(1),
        })
    }

    /// Graded basis: weights are grades, seeds are the `simple` members.
    pub fn size(
        spec: &SpectralDecomposition,
        graded: &GradedBasis,
        simple: &[usize],
    ) -> Result<Self> {
        if graded.hilbert_dim() != spec.dim() {
            return Err(Error::Dimension {
                expected: spec.dim(),
                found: graded.hilbert_dim(),
            });
        }
        if simple.is_empty() {
            return Err(Error::EmptySeeds);
        }
        let mut weights = Vec::with_capacity(graded.len());
        let mut members = Vec::with_capacity(graded.len());
        for q in 0..graded.len() {
            weights.push(graded.grade(q) as f64);
            members.push(spec.operator_to_eigenframe(&graded.materialize(q)?)?);
        }
        let seeds = simple
            .iter()
            .map(|&q| {
                members.get(q).cloned().ok_or(Error::Index {
                    index: q,
                    len: graded.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            frequencies: spec.frequencies.clone(),
            clusters: spec.frequency_clusters.clone(),
            seeds,
            weights,
            members,
            max_weight: graded.max_grade(),
        })
    }

    /// Replaces the seeds by arbitrary vectors already in the eigenframe.
    pub fn with_seeds(mut self, seeds: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = self.frequencies.len();
        if let Some(bad) = seeds.iter().find(|s| s.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: bad.len(),
            });
        }
        self.seeds = seeds;
        Ok(self)
    }

    pub fn seed_count(&self) -> usize {
        self.seeds.len()
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn seeds(&self) -> &[Vec<Complex64>] {
        &self.seeds
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Smallest gap between neighbouring cluster frequencies.
    pub fn min_gap(&self) -> Option<f64> {
        SpectralDecomposition::min_gap(&self.clusters)
    }

    fn seed(&self, n: usize) -> Result<&[Complex64]> {
        self.seeds.get(n).map(Vec::as_slice).ok_or(Error::Index {
            index: n,
            len: self.seeds.len(),
        })
    }

    /// `φ_b^{(n)}(t)` for every member `b`, in member order.
    pub fn phi(&self, n: usize, t: f64) -> Result<Vec<Complex64>> {
        let s = self.seed(n)?;
        let evolved: Vec<Complex64> = s
            .iter()
            .zip(&self.frequencies)
            .map(|(z, w)| z * Complex64::from_polar(1.0, w * t))
            .collect();
        Ok(self
            .members
            .iter()
            .map(|x| x.iter().zip(&evolved).map(|(a, b)| a.conj() * b).sum())
            .collect())
    }

    /// Weighted complexity of seed `n` at time `t`.
    pub fn value_at(&self, n: usize, t: f64) -> Result<f64> {
        let phi = self.phi(n, t)?;
        Ok(phi
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * p.norm_sqr())
            .sum())
    }

    /// Seed-averaged weighted complexity at `t`.
    pub fn mean_value_at(&self, t: f64) -> Result<f64> {
        let mut acc = 0.0;
        for n in 0..self.seeds.len() {
            acc += self.value_at(n, t)?;
        }
        Ok(acc / self.seeds.len() as f64)
    }

    /// All-time average per seed: `Σ_b w_b Σ_c |Σ_{α∈c} conj(X_b[α]) S_n[α]|²`.
    pub fn plateau_per_seed(&self) -> Vec<f64> {
        self.seeds
            .iter()
            .map(|s| {
                let mut total = 0.0;
                let mut prod = vec![Complex64::new(0.0, 0.0); s.len()];
                for (x, &w) in self.members.iter().zip(&self.weights) {
                    if w == 0.0 {
                        continue;
                    }
                    for ((p, a), b) in prod.iter_mut().zip(x).zip(s) {
                        *p = a.conj() * b;
                    }
                    let mut sum = 0.0;
                    for c in &self.clusters {
                        let z: Complex64 = c.members.iter().map(|&a| prod[a]).sum();
                        sum += z.norm_sqr();
                    }
                    total += w * sum;
                }
                total
            })
            .collect()
    }

    /// Trapezoidal average of the seed-averaged complexity on `samples`
    /// uniform points of `[0, t_max]`, evaluated by direct time evolution.
    pub fn time_average(&self, t_max: f64, samples: usize) -> Result<f64> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::Parameter(format!(
                "averaging window must be positive, got {t_max}"
            )));
        }
        if samples < 2 {
            return Err(Error::Parameter(format!(
                "need at least 2 samples, got {samples}"
            )));
        }
        let dt = t_max / (samples - 1) as f64;
        let quad: Vec<f64> = (0..samples)
            .map(|k| if k == 0 || k + 1 == samples { 0.5 } else { 1.0 })
            .collect();
        let series =
            self.series_on_grid(&(0..samples).map(|k| k as f64 * dt).collect::<Vec<_>>())?;
        let integral: f64 = series.iter().zip(&quad).map(|(v, q)| v * q).sum();
        Ok(integral / (samples - 1) as f64)
    }

    /// Seed-averaged complexity on a time grid, by blocked matrix products.
    pub fn series_on_grid(&self, times: &[f64]) -> Result<Vec<f64>> {
        const CHUNK: usize = 512;
        let active: Vec<usize> = (0..self.members.len())
            .filter(|&b| self.weights[b] != 0.0)
            .collect();
        let mut out = vec![0.0; times.len()];
        if active.is_empty() {
            return Ok(out);
        }
        for s in &self.seeds {
            let support: Vec<usize> = (0..s.len())
                .filter(|&a| s[a] != Complex64::new(0.0, 0.0))
                .collect();
            if support.is_empty() {
                continue;
            }
            let prod = |b: usize, a: usize| self.members[b][a].conj() * s[a];
            let real = is_real(s) && active.iter().all(|&b| is_real(&self.members[b]));
            let pr = DMatrix::from_fn(active.len(), support.len(), |i, k| {
                prod(active[i], support[k]).re
            });
            let pi = (!real).then(|| {
                DMatrix::from_fn(active.len(), support.len(), |i, k| {
                    prod(active[i], support[k]).im
                })
            });
            for (start, chunk) in times.chunks(CHUNK).enumerate().map(|(c, t)| (c * CHUNK, t)) {
                let cos = DMatrix::from_fn(support.len(), chunk.len(), |k, j| {
                    (self.frequencies[support[k]] * chunk[j]).cos()
                });
                let sin = DMatrix::from_fn(support.len(), chunk.len(), |k, j| {
                    (self.frequencies[support[k]] * chunk[j]).sin()
                });
                let (re, im) = match &pi {
                    None => (&pr * &cos, &pr * &sin),
                    Some(pi) => (&pr * &cos - pi * &sin, &pr * &sin + pi * &cos),
                };
                for j in 0..chunk.len() {
                    let mut acc = 0.0;
                    for (i, &b) in active.iter().enumerate() {
                        acc += self.weights[b] * (re[(i, j)].powi(2) + im[(i, j)].powi(2));
                    }
                    out[start + j] += acc;
                }
            }
        }
        let m = self.seeds.len() as f64;
        out.iter_mut().for_each(|v| *v /= m);
        Ok(out)
    }
}
