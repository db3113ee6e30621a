use num_complex::Complex64;
use rug::{Assign, Float};

use super::{HComplex, Precision};
use crate::error::{Error, Result};

/// Complex vector at a fixed working precision.
///
/// `im == None` means the imaginary part is exactly zero. Operations keep a
/// vector real for as long as every input involved is real.
#[derive(Clone, Debug, PartialEq)]
pub struct HVector {
    prec: Precision,
    re: Vec<Float>,
    im: Option<Vec<Float>>,
}

impl HVector {
    pub fn zeros(len: usize, prec: Precision) -> Self {
        Self {
            prec,
            re: vec![Float::new(prec.bits()); len],
            im: None,
        }
    }

    pub fn from_real(values: &[f64], prec: Precision) -> Self {
        Self {
            prec,
            re: values
                .iter()
                .map(|&x| Float::with_val(prec.bits(), x))
                .collect(),
            im: None,
        }
    }

    /// Promotes `f64` data; the result is real when every imaginary part is zero.
    pub fn from_complex(values: &[Complex64], prec: Precision) -> Self {
        let re = values
            .iter()
            .map(|z| Float::with_val(prec.bits(), z.re))
            .collect();
        let im = values.iter().any(|z| z.im != 0.0).then(|| {
            values
                .iter()
                .map(|z| Float::with_val(prec.bits(), z.im))
                .collect()
        });
        Self { prec, re, im }
    }

    pub fn from_parts(re: Vec<Float>, im: Option<Vec<Float>>) -> Result<Self> {
        let bits = re.first().map(Float::prec).unwrap_or(Precision::MIN_BITS);
        let prec = Precision::new(bits)?;
        if let Some(im) = &im {
            if im.len() != re.len() {
                return Err(Error::Dimension {
                    expected: re.len(),
                    found: im.len(),
                });
            }
        }
        let same = re
            .iter()
            .chain(im.iter().flatten())
            .all(|x| x.prec() == bits);
        if !same {
            return Err(Error::Contract("mixed precision within a vector".into()));
        }
        Ok(Self { prec, re, im })
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn is_real(&self) -> bool {
        self.im.is_none()
    }

    pub fn re(&self) -> &[Float] {
        &self.re
    }

    pub fn im(&self) -> Option<&[Float]> {
        self.im.as_deref()
    }

    pub fn entry(&self, i: usize) -> Complex64 {
        let im = self.im.as_ref().map_or(0.0, |im| im[i].to_f64());
        Complex64::new(self.re[i].to_f64(), im)
    }

    /// Rounds to standard precision.
    pub fn to_complex64(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.entry(i)).collect()
    }

    /// Same values re-rounded at another precision.
    pub fn with_precision(&self, prec: Precision) -> Self {
        let conv = |v: &Vec<Float>| v.iter().map(|x| Float::with_val(prec.bits(), x)).collect();
        Self {
            prec,
            re: conv(&self.re),
            im: self.im.as_ref().map(conv),
        }
    }

    /// Drops an imaginary part that has become exactly zero.
    pub fn compact(&mut self) {
        if self
            .im
            .as_ref()
            .is_some_and(|im| im.iter().all(Float::is_zero))
        {
            self.im = None;
        }
    }

    fn make_complex(&mut self) -> &mut Vec<Float> {
        let bits = self.prec.bits();
        let len = self.re.len();
        self.im.get_or_insert_with(|| vec![Float::new(bits); len])
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    /// `Σ conj(self_i) other_i`.
    pub fn inner(&self, other: &Self) -> Result<HComplex> {
        self.check_len(other)?;
        let mut out = HComplex::zero(self.prec);
        let (ar, br) = (&self.re, &other.re);
        for (a, b) in ar.iter().zip(br) {
            out.re += a * b;
        }
        match (&self.im, &other.im) {
            (None, None) => {}
            (None, Some(bi)) => {
                for (a, b) in ar.iter().zip(bi) {
                    out.im += a * b;
                }
            }
            (Some(ai), None) => {
                for (a, b) in ai.iter().zip(br) {
                    out.im -= a * b;
                }
            }
            (Some(ai), Some(bi)) => {
                for (a, b) in ai.iter().zip(bi) {
                    out.re += a * b;
                }
                for (a, b) in ar.iter().zip(bi) {
                    out.im += a * b;
                }
                for (a, b) in ai.iter().zip(br) {
                    out.im -= a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn norm_sqr(&self) -> Float {
        let mut acc = Float::new(self.prec.bits());
        for x in self.re.iter().chain(self.im.iter().flatten()) {
            acc += x * x;
        }
        acc
    }

    pub fn norm(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.len())
            .map(|i| self.entry(i).norm())
            .fold(0.0, f64::max)
    }

    /// `self -= c * x`.
    pub fn sub_scaled(&mut self, c: &HComplex, x: &Self) -> Result<()> {
        self.check_len(x)?;
        if c.is_zero() {
            return Ok(());
        }
        let cr = (!c.re.is_zero()).then_some(&c.re);
        let ci = (!c.im.is_zero()).then_some(&c.im);
        if let Some(cr) = cr {
            for (s, v) in self.re.iter_mut().zip(&x.re) {
                *s -= cr * v;
            }
        }
        if let Some(ci) = ci {
            let im = self.make_complex();
            for (s, v) in im.iter_mut().zip(&x.re) {
                *s -= ci * v;
            }
        }
        if let Some(xi) = &x.im {
            if let Some(ci) = ci {
                for (s, v) in self.re.iter_mut().zip(xi) {
                    *s += ci * v;
                }
            }
            if let Some(cr) = cr {
                let im = self.make_complex();
                for (s, v) in im.iter_mut().zip(xi) {
                    *s -= cr * v;
                }
            }
        }
        Ok(())
    }

    pub fn scale_real(&mut self, s: &Float) {
        for x in self.re.iter_mut().chain(self.im.iter_mut().flatten()) {
            *x *= s;
        }
    }

    /// `self *= c`.
    pub fn scale(&mut self, c: &HComplex) {
        if c.is_real() {
            self.scale_real(&c.re);
            return;
        }
        let bits = self.prec.bits();
        let len = self.len();
        let old_im = self.im.take();
        let mut re = Vec::with_capacity(len);
        let mut im = Vec::with_capacity(len);
        for (k, xr) in self.re.iter().enumerate() {
            let mut r = Float::with_val(bits, xr * &c.re);
            let mut i = Float::with_val(bits, xr * &c.im);
            if let Some(xi) = &old_im {
                r -= &xi[k] * &c.im;
                i += &xi[k] * &c.re;
            }
            re.push(r);
            im.push(i);
        }
        self.re = re;
        self.im = Some(im);
        self.compact();
    }

    /// Scales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> Float {
        let norm = self.norm();
        if !norm.is_zero() {
            let inv = Float::with_val(self.prec.bits(), 1) / &norm;
            self.scale_real(&inv);
        }
        norm
    }

    /// Rotates the vector by a unit phase so that its first entry with
    /// magnitude above `rel_threshold * ||self||` is real and positive.
    /// Returns the phase that was applied.
    pub fn canonicalize_phase(&mut self, rel_threshold: f64) -> HComplex {
        let norm = self.norm().to_f64();
        let cut = rel_threshold * norm;
        let Some(pos) = (0..self.len()).find(|&i| self.entry(i).norm() > cut) else {
            return HComplex::one(self.prec);
        };
        let bits = self.prec.bits();
        match &self.im {
            None => {
                let mut phase = HComplex::one(self.prec);
                if self.re[pos].is_sign_negative() {
                    phase.re.assign(-1);
                    self.scale_real(&phase.re);
                }
                phase
            }
            Some(im) => {
                let mut phase = HComplex {
                    re: self.re[pos].clone(),
                    im: Float::with_val(bits, -&im[pos]),
                };
                let inv = Float::with_val(bits, 1) / phase.abs();
                phase.scale_real(&inv);
                self.scale(&phase);
                // The pivot entry is real up to rounding; make it exactly so.
                if let Some(im) = self.im.as_mut() {
                    im[pos].assign(0);
                }
                self.compact();
                phase
            }
        }
    }
}
