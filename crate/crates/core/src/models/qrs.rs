use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hiprec::HMatrix;

/// Fock states with `N` particles and `M` quanta, occupations over modes `0..=M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBlock {
    particles: usize,
    quanta: usize,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl FockBlock {
    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn quanta(&self) -> usize {
        self.quanta
    }

    pub fn modes(&self) -> usize {
        self.quanta + 1
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Occupation tuples in ascending lexicographic order.
    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn index_of(&self, occupations: &[u32]) -> Option<usize> {
        self.index.get(occupations).copied()
    }
}

pub fn enumerate_fock(particles: usize, quanta: usize) -> Result<FockBlock> {
    if particles == 0 {
        return Err(Error::Parameter("a Fock block needs N >= 1".into()));
    }
    let mut states = Vec::new();
    let mut occ = vec![0u32; quanta + 1];
    fill_modes(quanta, particles, quanta, &mut occ, &mut states);
    states.sort();
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockBlock {
        particles,
        quanta,
        states,
        index,
    })
}

/// Assigns occupations to modes `mode, mode-1, ..., 0`.
fn fill_modes(
    mode: usize,
    particles_left: usize,
    quanta_left: usize,
    occ: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if mode == 0 {
        if quanta_left == 0 {
            occ[0] = particles_left as u32;
            out.push(occ.clone());
            occ[0] = 0;
        }
        return;
    }
    let max = particles_left.min(quanta_left / mode);
    for k in 0..=max {
        occ[mode] = k as u32;
        fill_modes(
            mode - 1,
            particles_left - k,
            quanta_left - k * mode,
            occ,
            out,
        );
    }
    occ[mode] = 0;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QrsCoupling {
    /// `C = 1` whenever any index vanishes, `0` otherwise.
    Integrable,
    /// Independent `U(0,1)` draws, one per symmetry orbit.
    Chaotic,
}

impl FromStr for QrsCoupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integrable" => Ok(Self::Integrable),
            "chaotic" => Ok(Self::Chaotic),
            other => Err(Error::Parameter(format!(
                "unknown coupling family `{other}`"
            ))),
        }
    }
}

impl fmt::Display for QrsCoupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Integrable => "integrable",
            Self::Chaotic => "chaotic",
        })
    }
}

/// Interaction coefficients `C_{nmkl}` for modes `0..modes`, zero unless
/// `n + m = k + l`, with `C_{nmkl} = C_{klnm} = C_{nmlk} = C_{mnkl}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings {
    modes: usize,
    table: Vec<f64>,
}

impl Couplings {
    pub fn new(modes: usize, family: QrsCoupling, rng_seed: u64) -> Self {
        let mut out = Self {
            modes,
            table: vec![0.0; modes.pow(4)],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        // Canonical orbit representatives n <= m, k <= l, (n, m) <= (k, l),
        // visited in lexicographic order so draws are reproducible.
        for n in 0..modes {
            for m in n..modes {
                for k in n..modes {
                    for l in k..modes {
                        if n + m != k + l || (n, m) > (k, l) {
                            continue;
                        }
                        let value = match family {
                            QrsCoupling::Integrable => {
                                if n == 0 || m == 0 || k == 0 || l == 0 {
                                    1.0
                                } else {
                                    0.0
                                }
                            }
                            QrsCoupling::Chaotic => rng.sample(Open01),
                        };
                        out.set_orbit(n, m, k, l, value);
                    }
                }
            }
        }
        out
    }

    fn idx(&self, n: usize, m: usize, k: usize, l: usize) -> usize {
        ((n * self.modes + m) * self.modes + k) * self.modes + l
    }

    fn set_orbit(&mut self, n: usize, m: usize, k: usize, l: usize, value: f64) {
        for (a, b) in [(n, m), (m, n)] {
            for (c, d) in [(k, l), (l, k)] {
                let i = self.idx(a, b, c, d);
                self.table[i] = value;
                let j = self.idx(c, d, a, b);
                self.table[j] = value;
            }
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn get(&self, n: usize, m: usize, k: usize, l: usize) -> f64 {
        if n + m != k + l {
            return 0.0;
        }
        self.table[self.idx(n, m, k, l)]
    }
}

/// Annihilates one boson in `mode`, returning the `sqrt(n)` factor.
fn lower(occ: &mut [u32], mode: usize) -> Option<f64> {
    let n = occ[mode];
    if n == 0 {
        return None;
    }
    occ[mode] = n - 1;
    Some((n as f64).sqrt())
}

fn raise(occ: &mut [u32], mode: usize) -> f64 {
    occ[mode] += 1;
    (occ[mode] as f64).sqrt()
}

/// `H = 1/2 Σ C_{nmkl} a_n† a_m† a_k a_l` on one `(N, M)` block.
///
/// Sums over unordered pairs `{n, m}` and `{k, l}`; the symmetry of `C` and
/// the commuting ladder operators give each ordered pair with distinct
/// members a multiplicity of two.
pub fn build_qrs(block: &FockBlock, coupling: QrsCoupling, rng_seed: u64) -> Result<HMatrix> {
    let modes = block.modes();
    let c = Couplings::new(modes, coupling, rng_seed);
    let d = block.dim();
    let mut h = DMatrix::<f64>::zeros(d, d);
    let weight = |a: usize, b: usize| if a == b { 1.0 } else { 2.0 };
    for (col, state) in block.states().iter().enumerate() {
        for k in 0..modes {
            for l in k..modes {
                let mut after = state.clone();
                let Some(f1) = lower(&mut after, l) else {
                    continue;
                };
                let Some(f2) = lower(&mut after, k) else {
                    continue;
                };
                let total = k + l;
                for n in 0..modes {
                    let m = total.wrapping_sub(n);
                    if m < n || m >= modes {
                        continue;
                    }
                    let cnmkl = c.get(n, m, k, l);
                    if cnmkl == 0.0 {
                        continue;
                    }
                    let mut out = after.clone();
                    let f3 = raise(&mut out, m);
                    let f4 = raise(&mut out, n);
                    let row = block.index_of(&out).ok_or_else(|| {
                        Error::Contract("ladder action left the (N, M) block".into())
                    })?;
                    h[(row, col)] += 0.5 * weight(n, m) * weight(k, l) * cnmkl * f1 * f2 * f3 * f4;
                }
            }
        }
    }
    HMatrix::from_real(&h)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Number of occupation tuples by brute force over all `(N+1)^(M+1)` tuples.
    fn brute_count(particles: usize, quanta: usize) -> usize {
        let modes = quanta + 1;
        let base = particles + 1;
        let mut count = 0;
        for code in 0..base.pow(modes as u32) {
            let mut c = code;
            let (mut n, mut m) = (0, 0);
            for mode in 0..modes {
                let occ = c % base;
                c /= base;
                n += occ;
                m += occ * mode;
            }
            if n == particles && m == quanta {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn small_blocks() {
        let b = enumerate_fock(2, 2).unwrap();
        assert_eq!(b.states(), &[vec![0, 2, 0], vec![1, 0, 1]]);
        let b = enumerate_fock(1, 5).unwrap();
        assert_eq!(b.states(), &[vec![0, 0, 0, 0, 0, 1]]);
        assert!(enumerate_fock(0, 3).is_err());
        let b = enumerate_fock(3, 0).unwrap();
        assert_eq!(b.states(), &[vec![3]]);
    }

    /// Partitions of `m` into at most `n` parts, by the conjugate recurrence
    /// on the largest allowed part.
    fn partition_count(m: usize, n: usize) -> usize {
        let mut p = vec![0usize; m + 1];
        p[0] = 1;
        for part in 1..=n {
            for total in part..=m {
                p[total] += p[total - part];
            }
        }
        p[m]
    }

    #[test]
    fn block_dims_match_partition_counts() {
        assert_eq!(partition_count(9, 9), 30);
        assert_eq!(
            partition_count(11, 11),
            enumerate_fock(11, 11).unwrap().dim()
        );
        assert_eq!(enumerate_fock(9, 9).unwrap().dim(), 30);
        for (n, m) in [(6, 6), (7, 7), (3, 5), (4, 2), (2, 7)] {
            let b = enumerate_fock(n, m).unwrap();
            assert_eq!(b.dim(), brute_count(n, m), "N={n} M={m}");
            for s in b.states() {
                assert_eq!(s.iter().sum::<u32>() as usize, n);
                let quanta: usize = s.iter().enumerate().map(|(i, &o)| i * o as usize).sum();
                assert_eq!(quanta, m);
            }
            assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn coupling_symmetries() {
        for family in [QrsCoupling::Integrable, QrsCoupling::Chaotic] {
            let c = Couplings::new(5, family, 17);
            for n in 0..5 {
                for m in 0..5 {
                    for k in 0..5 {
                        for l in 0..5 {
                            let v = c.get(n, m, k, l);
                            assert_eq!(v, c.get(k, l, n, m));
                            assert_eq!(v, c.get(n, m, l, k));
                            assert_eq!(v, c.get(m, n, k, l));
                            if n + m == k + l && family == QrsCoupling::Chaotic {
                                assert!(v > 0.0 && v < 1.0);
                            }
                        }
                    }
                }
            }
        }
        let c = Couplings::new(4, QrsCoupling::Integrable, 0);
        assert_eq!(c.get(0, 2, 1, 1), 1.0);
        assert_eq!(c.get(1, 2, 2, 1), 0.0);
    }

    #[test]
    fn chaotic_is_deterministic_per_seed() {
        let b = enumerate_fock(2, 2).unwrap();
        let h1 = build_qrs(&b, QrsCoupling::Chaotic, 7).unwrap();
        let h2 = build_qrs(&b, QrsCoupling::Chaotic, 7).unwrap();
        let h3 = build_qrs(&b, QrsCoupling::Chaotic, 8).unwrap();
        assert_eq!(h1, h2);
        assert_ne!(h1, h3);
    }

    #[test]
    fn unknown_coupling_tag() {
        assert!("integrable".parse::<QrsCoupling>().is_ok());
        assert!("regular".parse::<QrsCoupling>().is_err());
    }

    /// Applies `1/2 Σ_{n,m,k,l} C a_n† a_m† a_k a_l` term by term over all
    /// ordered index quadruples and all modes.
    fn brute_matrix(block: &FockBlock, c: &Couplings) -> DMatrix<f64> {
        let modes = block.modes();
        let d = block.dim();
        let mut h = DMatrix::zeros(d, d);
        for (col, state) in block.states().iter().enumerate() {
            for n in 0..modes {
                for m in 0..modes {
                    for k in 0..modes {
                        for l in 0..modes {
                            if n + m != k + l {
                                continue;
                            }
                            let mut s: Vec<i64> = state.iter().map(|&x| x as i64).collect();
                            let mut amp = 1.0;
                            for (mode, create) in [(l, false), (k, false), (m, true), (n, true)] {
                                if create {
                                    s[mode] += 1;
                                    amp *= (s[mode] as f64).sqrt();
                                } else {
                                    if s[mode] == 0 {
                                        amp = 0.0;
                                        break;
                                    }
                                    amp *= (s[mode] as f64).sqrt();
                                    s[mode] -= 1;
                                }
                            }
                            if amp == 0.0 {
                                continue;
                            }
                            let out: Vec<u32> = s.iter().map(|&x| x as u32).collect();
                            let row = block.index_of(&out).unwrap();
                            h[(row, col)] += 0.5 * c.get(n, m, k, l) * amp;
                        }
                    }
                }
            }
        }
        h
    }

    #[test]
    fn matrix_matches_term_by_term_oracle() {
        for (n, m, family) in [
            (3, 3, QrsCoupling::Integrable),
            (2, 2, QrsCoupling::Integrable),
            (4, 4, QrsCoupling::Chaotic),
            (3, 5, QrsCoupling::Chaotic),
        ] {
            let block = enumerate_fock(n, m).unwrap();
            let h = build_qrs(&block, family, 5).unwrap();
            let oracle = brute_matrix(&block, &Couplings::new(block.modes(), family, 5));
            let diff = h
                .as_dmatrix()
                .iter()
                .zip(oracle.iter())
                .map(|(a, b)| (a.re - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "N={n} M={m}: {diff}");
            assert!(h.is_hermitian());
        }
    }

    #[test]
    fn conserved_charges_commute_within_block() {
        let block = enumerate_fock(5, 5).unwrap();
        let h = build_qrs(&block, QrsCoupling::Chaotic, 3).unwrap();
        let d = block.dim();
        let n_op = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                block.states()[i].iter().sum::<u32>() as f64
            } else {
                0.0
            }
        });
        let m_op = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                block.states()[i]
                    .iter()
                    .enumerate()
                    .map(|(k, &o)| (k as u32 * o) as f64)
                    .sum()
            } else {
                0.0
            }
        });
        let hr = h.as_dmatrix().map(|z| z.re);
        for op in [n_op, m_op] {
            let c = &hr * &op - &op * &hr;
            assert!(c.iter().all(|x| x.abs() < 1e-12));
        }
    }
}
