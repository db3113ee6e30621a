use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::FockBlock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    /// Number of non-identity factors of a Pauli string.
    PauliWeight,
    /// `Σ_n |F_i(n) - F_j(n)|` for the transition `|F_i><F_j|`.
    FockTransitionRank,
}

#[derive(Clone, Debug)]
enum Source {
    Pauli { sites: usize },
    Fock { states: Vec<Vec<u32>> },
}

/// A complete orthonormal operator basis grouped by grade.
///
/// Members are identified by an index and materialized on demand as
/// row-major flattened `f64` operators. Pauli member `q` has base-4 digits
/// `I, X, Y, Z` with site 0 most significant; Fock member `i d + j` is
/// `|F_i><F_j|`.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    grading: Grading,
    source: Source,
    grades: Vec<usize>,
}

pub fn graded_pauli_basis(sites: usize) -> Result<GradedBasis> {
    if !(3..=12).contains(&sites) {
        return Err(Error::Parameter(format!(
            "chains need between 3 and 12 sites, got {sites}"
        )));
    }
    let grades = (0..1usize << (2 * sites))
        .map(|q| {
            (0..sites)
                .filter(|s| (q >> (2 * (sites - 1 - s))) & 3 != 0)
                .count()
        })
        .collect();
    Ok(GradedBasis {
        grading: Grading::PauliWeight,
        source: Source::Pauli { sites },
        grades,
    })
}

pub fn graded_fock_basis(block: &FockBlock) -> GradedBasis {
    let states = block.states().to_vec();
    let d = states.len();
    let grades = (0..d * d)
        .map(|a| {
            states[a / d]
                .iter()
                .zip(&states[a % d])
                .map(|(x, y)| x.abs_diff(*y) as usize)
                .sum()
        })
        .collect();
    GradedBasis {
        grading: Grading::FockTransitionRank,
        source: Source::Fock { states },
        grades,
    }
}

impl GradedBasis {
    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Hilbert-space dimension `d`.
    pub fn hilbert_dim(&self) -> usize {
        match &self.source {
            Source::Pauli { sites } => 1 << sites,
            Source::Fock { states } => states.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn grade(&self, member: usize) -> usize {
        self.grades[member]
    }

    pub fn max_grade(&self) -> usize {
        self.grades.iter().copied().max().unwrap_or(0)
    }

    /// `(grade, members)` in ascending grade order.
    pub fn levels(&self) -> Vec<(usize, Vec<usize>)> {
        let mut levels: Vec<(usize, Vec<usize>)> =
            (0..=self.max_grade()).map(|g| (g, Vec::new())).collect();
        for (idx, &g) in self.grades.iter().enumerate() {
            levels[g].1.push(idx);
        }
        levels.retain(|(_, m)| !m.is_empty());
        levels
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels().iter().map(|(_, m)| m.len()).collect()
    }

    /// Members averaged over by the size diagnostic: grade 1 for Pauli
    /// strings, grade 0 for Fock transitions.
    pub fn simple_set(&self) -> Vec<usize> {
        let g = match self.grading {
            Grading::PauliWeight => 1,
            Grading::FockTransitionRank => 0,
        };
        (0..self.len()).filter(|&i| self.grades[i] == g).collect()
    }

    /// Unit-norm flattened operator for `member`.
    pub fn materialize(&self, member: usize) -> Result<Vec<Complex64>> {
        if member >= self.len() {
            return Err(Error::Index {
                index: member,
                len: self.len(),
            });
        }
        let d = self.hilbert_dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        match &self.source {
            Source::Pauli { sites } => {
                let scale = 1.0 / (d as f64).sqrt();
                for col in 0..d {
                    let mut row = col;
                    let mut amp = Complex64::new(scale, 0.0);
                    for s in 0..*sites {
                        let digit = (member >> (2 * (sites - 1 - s))) & 3;
                        let bit = sites - 1 - s;
                        let up = (col >> bit) & 1 == 0;
                        match digit {
                            1 => row ^= 1 << bit,
                            2 => {
                                row ^= 1 << bit;
                                amp *= if up {
                                    Complex64::new(0.0, 1.0)
                                } else {
                                    Complex64::new(0.0, -1.0)
                                };
                            }
                            3 if !up => amp = -amp,
                            _ => {}
                        }
                    }
                    out[row * d + col] = amp;
                }
            }
            Source::Fock { .. } => out[member] = Complex64::new(1.0, 0.0),
        }
        Ok(out)
    }
}
