use rug::Float;

use crate::error::{Error, Result};
use crate::hiprec::{HMatrix, HVector, Precision};
use crate::krylov::LinearOperator;

/// Nonzero entries of `H` promoted to working precision, stored by row.
#[derive(Clone, Debug)]
struct PromotedRows {
    dim: usize,
    prec: Precision,
    rows: Vec<Vec<(usize, Float, Option<Float>)>>,
    real: bool,
}

impl PromotedRows {
    fn new(h: &HMatrix, prec: Precision) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::Contract(
                "operator-space dynamics need a Hermitian Hamiltonian".into(),
            ));
        }
        let m = h.as_dmatrix();
        let dim = m.nrows();
        let bits = prec.bits();
        let rows = (0..dim)
            .map(|i| {
                (0..dim)
                    .filter(|&j| m[(i, j)].norm() != 0.0)
                    .map(|j| {
                        let z = m[(i, j)];
                        let im = (z.im != 0.0).then(|| Float::with_val(bits, z.im));
                        (j, Float::with_val(bits, z.re), im)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            dim,
            prec,
            rows,
            real: h.is_real(),
        })
    }
}

/// `acc += sign * h * x` for possibly complex `h` and `x`.
#[inline]
fn mac(
    acc_re: &mut Float,
    acc_im: Option<&mut Float>,
    h: (&Float, Option<&Float>),
    x: (&Float, Option<&Float>),
    negate: bool,
) {
    let (hr, hi) = h;
    let (xr, xi) = x;
    if negate {
        *acc_re -= hr * xr;
        if let (Some(hi), Some(xi)) = (hi, xi) {
            *acc_re += hi * xi;
        }
        if let Some(acc_im) = acc_im {
            if let Some(xi) = xi {
                *acc_im -= hr * xi;
            }
            if let Some(hi) = hi {
                *acc_im -= hi * xr;
            }
        }
    } else {
        *acc_re += hr * xr;
        if let (Some(hi), Some(xi)) = (hi, xi) {
            *acc_re -= hi * xi;
        }
        if let Some(acc_im) = acc_im {
            if let Some(xi) = xi {
                *acc_im += hr * xi;
            }
            if let Some(hi) = hi {
                *acc_im += hi * xr;
            }
        }
    }
}

/// The commutator map `O -> [H, O]` on row-major flattened `d x d` operators.
///
/// Only the nonzero entries of `H` are visited, so a product costs
/// `O(nnz(H) d)` rather than `O(d^3)`; the `d^2 x d^2` superoperator is
/// never formed.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    h: PromotedRows,
}

impl Liouvillian {
    pub fn new(h: &HMatrix, prec: Precision) -> Result<Self> {
        Ok(Self {
            h: PromotedRows::new(h, prec)?,
        })
    }

    pub fn hilbert_dim(&self) -> usize {
        self.h.dim
    }

    pub fn precision(&self) -> Precision {
        self.h.prec
    }
}

impl LinearOperator for Liouvillian {
    fn dim(&self) -> usize {
        self.h.dim * self.h.dim
    }

    fn apply(&self, o: &HVector) -> Result<HVector> {
        let d = self.h.dim;
        if o.len() != d * d {
            return Err(Error::Dimension {
                expected: d * d,
                found: o.len(),
            });
        }
        let bits = self.h.prec.bits();
        let complex = !(self.h.real && o.is_real());
        let mut re = vec![Float::new(bits); d * d];
        let mut im = complex.then(|| vec![Float::new(bits); d * d]);
        let (ore, oim) = (o.re(), o.im());
        let x = |idx: usize| (&ore[idx], oim.map(|v| &v[idx]));

        // (H O)_ij = Σ_k H_ik O_kj
        for i in 0..d {
            for (k, hr, hi) in &self.h.rows[i] {
                for j in 0..d {
                    let src = k * d + j;
                    if ore[src].is_zero() && oim.is_none_or(|v| v[src].is_zero()) {
                        continue;
                    }
                    let dst = i * d + j;
                    mac(
                        &mut re[dst],
                        im.as_mut().map(|v| &mut v[dst]),
                        (hr, hi.as_ref()),
                        x(src),
                        false,
                    );
                }
            }
        }
        // (O H)_ij = Σ_k O_ik H_kj
        for i in 0..d {
            for k in 0..d {
                let src = i * d + k;
                if ore[src].is_zero() && oim.is_none_or(|v| v[src].is_zero()) {
                    continue;
                }
                for (j, hr, hi) in &self.h.rows[k] {
                    let dst = i * d + j;
                    mac(
                        &mut re[dst],
                        im.as_mut().map(|v| &mut v[dst]),
                        (hr, hi.as_ref()),
                        x(src),
                        true,
                    );
                }
            }
        }
        let mut out = HVector::from_parts(re, im)?;
        out.compact();
        Ok(out)
    }
}

/// One-shot `flatten(H O - O H)` at the precision of `o`.
pub fn liouvillian_apply(h: &HMatrix, o: &HVector) -> Result<HVector> {
    Liouvillian::new(h, o.precision())?.apply(o)
}

/// `psi -> H psi` on Hilbert-space vectors, for spread complexity of states.
#[derive(Clone, Debug)]
pub struct HamiltonianAction {
    h: PromotedRows,
}

impl HamiltonianAction {
    pub fn new(h: &HMatrix, prec: Precision) -> Result<Self> {
        Ok(Self {
            h: PromotedRows::new(h, prec)?,
        })
    }
}

impl LinearOperator for HamiltonianAction {
    fn dim(&self) -> usize {
        self.h.dim
    }

    fn apply(&self, psi: &HVector) -> Result<HVector> {
        let d = self.h.dim;
        if psi.len() != d {
            return Err(Error::Dimension {
                expected: d,
                found: psi.len(),
            });
        }
        let bits = self.h.prec.bits();
        let complex = !(self.h.real && psi.is_real());
        let mut re = vec![Float::new(bits); d];
        let mut im = complex.then(|| vec![Float::new(bits); d]);
        let (pre, pim) = (psi.re(), psi.im());
        for i in 0..d {
            for (k, hr, hi) in &self.h.rows[i] {
                mac(
                    &mut re[i],
                    im.as_mut().map(|v| &mut v[i]),
                    (hr, hi.as_ref()),
                    (&pre[*k], pim.map(|v| &v[*k])),
                    false,
                );
            }
        }
        let mut out = HVector::from_parts(re, im)?;
        out.compact();
        Ok(out)
    }
}
