use serde::{Deserialize, Serialize};

/// One entry of a run's drift log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftRecord {
    /// Index of the level that was just created.
    pub level: usize,
    /// Drift estimate before any reorthogonalization at this level.
    pub estimate: f64,
    pub reorthogonalized: bool,
}

/// Norm-based ω-recurrence for block Lanczos.
///
/// `ω(K, J)` bounds `||Q_K† Q_J||` for `K < J`. Writing the recurrence as
/// `Q_{J+1} B_{J+1} = L Q_J - Q_J A_J - Q_{J-1} B_J† - F_J` and projecting on
/// `Q_K` gives, for `K <= J - 2`,
///
/// ```text
/// ω(K, J+1) σ_min(B_{J+1}) <= ||B_{K+1}|| ω(K+1, J) + (||A_K|| + ||A_J||) ω(K, J)
///                           + ||B_K|| ω(K-1, J) + ||B_J|| ω(K, J-1) + ψ
/// ```
///
/// with `ψ = 2 ε₀ ||L||` covering rounding in both operator applications.
/// Overlaps with the two levels handled by the local recurrence are set to
/// `ε₀ = ε sqrt(D)`.
#[derive(Clone, Debug)]
pub struct DriftTracker {
    eps0: f64,
    /// `rows[J][K] = ω(K, J)` for `K < J`.
    rows: Vec<Vec<f64>>,
    a_norms: Vec<f64>,
    /// `b_norms[J] = ||B_J||`, coupling level `J - 1` to `J`; `b_norms[0] = 0`.
    b_norms: Vec<f64>,
    running_max: f64,
}

impl DriftTracker {
    pub fn new(epsilon: f64, dim: usize) -> Self {
        let eps0 = epsilon * (dim.max(1) as f64).sqrt();
        Self {
            eps0,
            rows: vec![Vec::new()],
            a_norms: Vec::new(),
            b_norms: vec![0.0],
            running_max: eps0,
        }
    }

    pub fn local_level(&self) -> f64 {
        self.eps0
    }

    /// Current estimate: the largest bound seen since the last reset.
    pub fn estimate(&self) -> f64 {
        self.running_max
    }

    /// Number of levels the tracker knows about.
    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    /// Registers level `J + 1` given `||A_J||`, `||B_{J+1}||`,
    /// `σ_min(B_{J+1})` and the current `||L||` estimate, and returns the
    /// updated drift estimate.
    pub fn advance(&mut self, a_norm: f64, b_norm: f64, sigma_min: f64, l_norm: f64) -> f64 {
        let j = self.rows.len() - 1;
        self.a_norms.push(a_norm);
        self.b_norms.push(b_norm);
        let psi = 2.0 * self.eps0 * l_norm;
        let mut row = vec![self.eps0; j + 1];
        let mut worst = if j == 0 { 0.0 } else { self.eps0 };
        if j >= 2 {
            let cur = &self.rows[j];
            let prev = &self.rows[j - 1];
            let sigma = sigma_min.max(f64::MIN_POSITIVE);
            for k in 0..=j - 2 {
                let below = if k > 0 {
                    self.b_norms[k] * cur[k - 1]
                } else {
                    0.0
                };
                let num = self.b_norms[k + 1] * cur[k + 1]
                    + (self.a_norms[k] + self.a_norms[j]) * cur[k]
                    + below
                    + self.b_norms[j] * prev[k]
                    + psi;
                row[k] = num / sigma;
                worst = worst.max(row[k]);
            }
        }
        self.rows.push(row);
        self.running_max = self.running_max.max(worst);
        self.running_max
    }

    /// Marks the two newest levels as fully reorthogonalized.
    pub fn reset_latest(&mut self) {
        let n = self.rows.len();
        for row in self.rows.iter_mut().skip(n.saturating_sub(2)) {
            row.iter_mut().for_each(|w| *w = self.eps0);
        }
        self.running_max = self.eps0;
    }
}
