use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{eigenvalue_magnitude, harmonic_dimension};

/// Largest coefficient count accepted when reading a field from text.
pub const MAX_PARSED_COEFFICIENTS: usize = 1 << 22;

/// Real-basis component of a mode on `S^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    /// `m = 0`
    Zonal,
    /// `√2 L_{l,m}(θ) cos(mφ)`
    Cos,
    /// `√2 L_{l,m}(θ) sin(mφ)`
    Sin,
}

impl Component {
    pub fn code(self) -> u8 {
        match self {
            Component::Zonal => 0,
            Component::Cos => 1,
            Component::Sin => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Component::Zonal),
            1 => Some(Component::Cos),
            2 => Some(Component::Sin),
            _ => None,
        }
    }
}

/// Coefficients of a band-limited expansion in the real orthonormal basis of
/// `S^{d−1}`.
///
/// Coefficients are stored degree by degree. On `S^2` the block of degree `l`
/// is `[c_{l,0}, c¹_{l,1}, c²_{l,1}, …, c¹_{l,l}, c²_{l,l}]`; for `d > 3` it is a
/// flat block of length `h(l,d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    band: usize,
    dim: usize,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

fn degree_offsets(band: usize, dim: usize, cap: usize) -> Result<Vec<usize>> {
    // every degree holds at least one coefficient
    if band >= cap {
        return Err(Error::Overflow { ell: band, d: dim });
    }
    let mut offsets = Vec::with_capacity(band + 2);
    let mut total = 0usize;
    offsets.push(0);
    for ell in 0..=band {
        total = total
            .checked_add(harmonic_dimension(ell, dim)?)
            .filter(|&t| t <= cap)
            .ok_or(Error::Overflow { ell, d: dim })?;
        offsets.push(total);
    }
    Ok(offsets)
}

impl CoefficientField {
    /// All-zero field of band `band` on `S^{dim−1}`.
    pub fn zeros(band: usize, dim: usize) -> Result<Self> {
        let offsets = degree_offsets(band, dim, isize::MAX as usize / 8)?;
        let len = offsets[band + 1];
        Ok(Self {
            band,
            dim,
            offsets,
            values: vec![0.0; len],
        })
    }

    /// All-zero field on `S^2`.
    pub fn sphere(band: usize) -> Self {
        let offsets = (0..=band + 1).map(|l| l * l).collect();
        Self {
            band,
            dim: 3,
            offsets,
            values: vec![0.0; (band + 1) * (band + 1)],
        }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Coefficients of degree `ell`.
    pub fn degree(&self, ell: usize) -> &[f64] {
        &self.values[self.offsets[ell]..self.offsets[ell + 1]]
    }

    pub fn degree_mut(&mut self, ell: usize) -> &mut [f64] {
        &mut self.values[self.offsets[ell]..self.offsets[ell + 1]]
    }

    /// Flat offset of the first coefficient of degree `ell`.
    pub fn offset(&self, ell: usize) -> usize {
        self.offsets[ell]
    }

    /// Position of `(ell, m, component)` inside the degree block (`d = 3`).
    pub fn slot(ell: usize, m: usize, component: Component) -> Result<usize> {
        match (m, component) {
            (0, Component::Zonal) => Ok(0),
            (m, Component::Cos) if m >= 1 && m <= ell => Ok(2 * m - 1),
            (m, Component::Sin) if m >= 1 && m <= ell => Ok(2 * m),
            _ => Err(Error::InvalidOrder { ell, m }),
        }
    }

    fn index(&self, ell: usize, m: usize, component: Component) -> Result<usize> {
        if self.dim != 3 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if ell > self.band {
            return Err(Error::DimensionMismatch(format!(
                "degree {ell} exceeds band {}",
                self.band
            )));
        }
        Ok(self.offsets[ell] + Self::slot(ell, m, component)?)
    }

    pub fn get(&self, ell: usize, m: usize, component: Component) -> Result<f64> {
        Ok(self.values[self.index(ell, m, component)?])
    }

    pub fn set(&mut self, ell: usize, m: usize, component: Component, value: f64) -> Result<()> {
        let i = self.index(ell, m, component)?;
        self.values[i] = value;
        Ok(())
    }

    /// Projection onto (or zero extension to) band `band`.
    pub fn with_band(&self, band: usize) -> Self {
        let mut out = if self.dim == 3 {
            Self::sphere(band)
        } else if band <= self.band {
            Self {
                band,
                dim: self.dim,
                offsets: self.offsets[..band + 2].to_vec(),
                values: Vec::new(),
            }
        } else {
            Self::zeros(band, self.dim).expect("extension of a valid field")
        };
        let keep = out.offsets[band.min(self.band) + 1];
        if out.values.is_empty() {
            out.values = self.values[..keep].to_vec();
        } else {
            out.values[..keep].copy_from_slice(&self.values[..keep]);
        }
        out
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `L²` norm via Parseval.
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `Σ_m c²_{l,m}` for every degree.
    pub fn degree_norms_squared(&self) -> Vec<f64> {
        (0..=self.band)
            .map(|ell| self.degree(ell).iter().map(|v| v * v).sum())
            .collect()
    }

    /// Squared `L²` norm of the degrees above `kappa`, the truncation error
    /// of projecting onto band `kappa`.
    pub fn tail_norm_squared(&self, kappa: usize) -> f64 {
        if kappa >= self.band {
            return 0.0;
        }
        self.values[self.offsets[kappa + 1]..]
            .iter()
            .map(|v| v * v)
            .sum()
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    /// `self += other`; both fields must share band and dimension.
    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        self.values
            .iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a += b);
        Ok(())
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.band != other.band || self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "band {} / d={} vs band {} / d={}",
                self.band, self.dim, other.band, other.dim
            )));
        }
        Ok(())
    }

    /// Eigenvalue magnitude `l(l+d−2)` for each degree.
    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.band).map(|ell| eigenvalue_magnitude(ell, self.dim) as f64)
    }

    /// `(ell, m, component)` label of each stored coefficient, in storage
    /// order. For `d > 3` the order index runs `1..=h(l,d)` with component 0.
    pub fn labels(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        (0..=self.band).flat_map(move |ell| {
            let n = self.offsets[ell + 1] - self.offsets[ell];
            let sphere = self.dim == 3;
            (0..n).map(move |k| {
                if !sphere {
                    (ell, k + 1, 0)
                } else if k == 0 {
                    (ell, 0, 0)
                } else {
                    (ell, k.div_ceil(2), if k % 2 == 1 { 1 } else { 2 })
                }
            })
        })
    }

    /// Writes the `ell,m,component,value` rows with a header line.
    pub fn write_rows<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "ell,m,component,value")?;
        for ((ell, m, c), v) in self.labels().zip(&self.values) {
            writeln!(out, "{ell},{m},{c},{v:.16e}")?;
        }
        Ok(())
    }

    /// CSV export: `# d=` and `# kappa=` lines, then the coefficient rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# d={}", self.dim)?;
        writeln!(out, "# kappa={}", self.band)?;
        self.write_rows(&mut out)
    }

    /// Reads the format written by [`CoefficientField::write_csv`].
    ///
    /// Comment lines may carry `d=` and `kappa=`; other comments are skipped.
    /// Without `kappa=` the band is the largest degree present. Coefficients
    /// not listed are zero.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut dim = 3usize;
        let mut band: Option<usize> = None;
        let mut rows = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            if let Some(comment) = text.strip_prefix('#') {
                for (key, value) in comment_pairs(comment) {
                    match key {
                        "d" => dim = parse_num(value, lineno)?,
                        "kappa" => band = Some(parse_num(value, lineno)?),
                        _ => {}
                    }
                }
                continue;
            }
            if text.starts_with("ell") {
                continue;
            }
            rows.push((lineno, parse_row(text, lineno)?));
        }
        let band = match band {
            Some(b) => b,
            None => rows.iter().map(|(_, r)| r.0).max().ok_or(Error::Parse {
                line: 0,
                msg: "no coefficients and no kappa".into(),
            })?,
        };
        Self::from_rows(band, dim, rows)
    }

    pub(crate) fn from_rows(
        band: usize,
        dim: usize,
        rows: Vec<(usize, (usize, usize, u8, f64))>,
    ) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidDimension(dim));
        }
        let offsets = degree_offsets(band, dim, MAX_PARSED_COEFFICIENTS)?;
        let mut field = Self {
            band,
            dim,
            values: vec![0.0; offsets[band + 1]],
            offsets,
        };
        let mut seen = HashSet::with_capacity(rows.len());
        for (line, (ell, m, c, value)) in rows {
            let bad = |msg: String| Error::Parse { line, msg };
            if ell > band {
                return Err(bad(format!("degree {ell} exceeds kappa={band}")));
            }
            let slot = if dim == 3 {
                let comp =
                    Component::from_code(c).ok_or_else(|| bad(format!("unknown component {c}")))?;
                CoefficientField::slot(ell, m, comp)
                    .map_err(|_| bad(format!("invalid mode ({ell},{m},{c})")))?
            } else {
                let h = field.offsets[ell + 1] - field.offsets[ell];
                if c != 0 || m == 0 || m > h {
                    return Err(bad(format!("invalid mode ({ell},{m},{c}) for d={dim}")));
                }
                m - 1
            };
            if !seen.insert((ell, slot)) {
                return Err(bad(format!("duplicate mode ({ell},{m},{c})")));
            }
            let idx = field.offsets[ell] + slot;
            field.values[idx] = value;
        }
        Ok(field)
    }
}

/// `key=value` pairs from a comment line, split on whitespace.
pub(crate) fn comment_pairs(comment: &str) -> impl Iterator<Item = (&str, &str)> {
    comment
        .split_whitespace()
        .filter_map(|tok| tok.split_once('='))
}

pub(crate) fn parse_num<T: std::str::FromStr>(value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad number {value:?}"),
    })
}

pub(crate) fn parse_row(text: &str, line: usize) -> Result<(usize, usize, u8, f64)> {
    let mut parts = text.split(',').map(str::trim);
    let mut next = || {
        parts.next().ok_or(Error::Parse {
            line,
            msg: "expected 4 columns".into(),
        })
    };
    let ell = parse_num(next()?, line)?;
    let m = parse_num(next()?, line)?;
    let c = parse_num(next()?, line)?;
    let v: f64 = parse_num(next()?, line)?;
    if parts.next().is_some() {
        return Err(Error::Parse {
            line,
            msg: "expected 4 columns".into(),
        });
    }
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value {v}"),
        });
    }
    Ok((ell, m, c, v))
}
