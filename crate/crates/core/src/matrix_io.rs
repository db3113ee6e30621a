//! Portable text container for matrices, seed families and Krylov bases.
//!
//! ```text
//! mskrylov-matrix 1
//! rows 2 cols 2 precision 53 complex false
//! 1
//! 0
//! 0
//! -1
//! ```
//!
//! Entries follow row-major, one per line; complex entries are written as
//! `re im`. Values are printed with enough digits to round-trip exactly at
//! the stated precision.

use std::io::{BufRead, Write};
use std::path::Path;

use rug::Float;

use crate::error::{Error, Result};
use crate::hiprec::{HMatrix, HVector, Precision};

const MAGIC: &str = "mskrylov-matrix 1";

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub precision: Precision,
    pub re: Vec<Float>,
    pub im: Option<Vec<Float>>,
}

impl MatrixData {
    pub fn from_hmatrix(m: &HMatrix) -> Self {
        let d = m.as_dmatrix();
        let (rows, cols) = d.shape();
        let at = |k: usize| d[(k / cols, k % cols)];
        let re = (0..rows * cols)
            .map(|k| Float::with_val(53, at(k).re))
            .collect();
        let im = (!m.is_real()).then(|| {
            (0..rows * cols)
                .map(|k| Float::with_val(53, at(k).im))
                .collect()
        });
        Self {
            rows,
            cols,
            precision: Precision::standard(),
            re,
            im,
        }
    }

    /// One vector per row.
    pub fn from_vectors(vectors: &[HVector]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptySeeds)?;
        let (cols, prec) = (first.len(), first.precision());
        let complex = vectors.iter().any(|v| !v.is_real());
        let mut re = Vec::with_capacity(vectors.len() * cols);
        let mut im = complex.then(|| Vec::with_capacity(vectors.len() * cols));
        for v in vectors {
            if v.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    found: v.len(),
                });
            }
            if v.precision() != prec {
                return Err(Error::Contract("vectors at mixed precision".into()));
            }
            re.extend(v.re().iter().cloned());
            if let Some(im) = im.as_mut() {
                match v.im() {
                    Some(x) => im.extend(x.iter().cloned()),
                    None => im.extend((0..cols).map(|_| Float::new(prec.bits()))),
                }
            }
        }
        Ok(Self {
            rows: vectors.len(),
            cols,
            precision: prec,
            re,
            im,
        })
    }

    pub fn to_vectors(&self) -> Result<Vec<HVector>> {
        (0..self.rows)
            .map(|r| {
                let span = r * self.cols..(r + 1) * self.cols;
                let im = self.im.as_ref().map(|im| im[span.clone()].to_vec());
                let mut v = HVector::from_parts(self.re[span].to_vec(), im)?;
                v.compact();
                Ok(v)
            })
            .collect()
    }

    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "{MAGIC}")?;
        writeln!(
            out,
            "rows {} cols {} precision {} complex {}",
            self.rows,
            self.cols,
            self.precision.bits(),
            self.im.is_some()
        )?;
        for k in 0..self.re.len() {
            match &self.im {
                Some(im) => writeln!(out, "{} {}", fmt(&self.re[k]), fmt(&im[k]))?,
                None => writeln!(out, "{}", fmt(&self.re[k]))?,
            }
        }
        Ok(())
    }

    pub fn read_from(input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::Format("unexpected end of file".into()))
        };
        if next()?.trim() != MAGIC {
            return Err(Error::Format("missing header".into()));
        }
        let header = next()?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let keys = ["rows", "cols", "precision", "complex"];
        if fields.len() != 8 || (0..4).any(|i| fields[2 * i] != keys[i]) {
            return Err(Error::Format(format!("bad shape line: {header}")));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Format(format!("{s}: {e}")))
        };
        let rows = num(fields[1])?;
        let cols = num(fields[3])?;
        let precision = Precision::new(num(fields[5])? as u32)?;
        let complex = match fields[7] {
            "true" => true,
            "false" => false,
            other => return Err(Error::Format(format!("bad complex flag {other}"))),
        };
        let bits = precision.bits();
        let parse = |s: &str| -> Result<Float> {
            Float::parse(s)
                .map(|p| Float::with_val(bits, p))
                .map_err(|e| Error::Format(format!("{s}: {e}")))
        };
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = complex.then(|| Vec::with_capacity(rows * cols));
        for _ in 0..rows * cols {
            let line = next()?;
            let mut parts = line.split_whitespace();
            let r = parts
                .next()
                .ok_or_else(|| Error::Format("empty entry".into()))?;
            re.push(parse(r)?);
            if let Some(im) = im.as_mut() {
                let i = parts
                    .next()
                    .ok_or_else(|| Error::Format("missing imaginary part".into()))?;
                im.push(parse(i)?);
            }
        }
        Ok(Self {
            rows,
            cols,
            precision,
            re,
            im,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn fmt(x: &Float) -> String {
    x.to_string_radix(10, None)
}
