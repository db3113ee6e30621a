use num_complex::Complex64;
use rug::Float;

use super::Precision;

/// Complex scalar as a pair of same-precision MPFR reals.
#[derive(Clone, Debug, PartialEq)]
pub struct HComplex {
    pub re: Float,
    pub im: Float,
}

impl HComplex {
    pub fn zero(prec: Precision) -> Self {
        Self {
            re: Float::new(prec.bits()),
            im: Float::new(prec.bits()),
        }
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_real(Float::with_val(prec.bits(), 1))
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn from_c64(z: Complex64, prec: Precision) -> Self {
        Self {
            re: Float::with_val(prec.bits(), z.re),
            im: Float::with_val(prec.bits(), z.im),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut out = Float::with_val(self.re.prec(), &self.re * &self.re);
        out += &self.im * &self.im;
        out
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.re -= &other.re;
        self.im -= &other.im;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.re.prec();
        let mut re = Float::with_val(prec, &self.re * &other.re);
        re -= &self.im * &other.im;
        let mut im = Float::with_val(prec, &self.re * &other.im);
        im += &self.im * &other.re;
        Self { re, im }
    }

    pub fn scale_real(&mut self, s: &Float) {
        self.re *= s;
        self.im *= s;
    }
}
