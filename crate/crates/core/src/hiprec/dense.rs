use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix at standard precision.
///
/// Hamiltonians are built here and promoted to working precision only when
/// they enter a Lanczos loop. The Hermitian flag is set by
/// [`HMatrix::hermitian`], which checks `max|A - A†| <= 8 eps max|A|` and
/// stores `(A + A†) / 2`, Hermitian to the last bit.
#[derive(Clone, Debug, PartialEq)]
pub struct HMatrix {
    data: DMatrix<Complex64>,
    hermitian: bool,
}

impl HMatrix {
    pub fn general(data: DMatrix<Complex64>) -> Self {
        Self {
            data,
            hermitian: false,
        }
    }

    pub fn hermitian(data: DMatrix<Complex64>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::Contract(format!(
                "Hermitian matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let scale = max_abs(&data);
        let defect = hermiticity_defect(&data);
        if defect > 8.0 * f64::EPSILON * scale {
            return Err(Error::Contract(format!(
                "matrix is not Hermitian: max|A - A^H| = {defect:e}"
            )));
        }
        let n = data.nrows();
        let data = DMatrix::from_fn(n, n, |i, j| 0.5 * (data[(i, j)] + data[(j, i)].conj()));
        Ok(Self {
            data,
            hermitian: true,
        })
    }

    pub fn from_real(data: &DMatrix<f64>) -> Result<Self> {
        Self::hermitian(data.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian-flagged matrix at standard precision.
///
/// Eigenvalues are returned in ascending order and the columns of the second
/// value are the matching orthonormal eigenvectors.
pub fn symmetric_eigen(m: &HMatrix) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if !m.is_hermitian() {
        return Err(Error::Contract(
            "symmetric_eigen requires a Hermitian-flagged matrix".into(),
        ));
    }
    let n = m.nrows();
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if m.is_real() {
        let real = m.data.map(|z| z.re);
        let eig = SymmetricEigen::new(real);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::new(m.data.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok((sorted_values, sorted_vectors))
}
