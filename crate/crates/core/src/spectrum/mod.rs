//! Angular power spectra, coefficient fields and Sobolev-regular random data.

mod field;

pub(crate) use field::{comment_pairs, parse_num, parse_row};
pub use field::{CoefficientField, Component, MAX_PARSED_COEFFICIENTS};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::harmonics::{eigenvalue_magnitude, harmonic_dimension};

/// Power-law angular power spectrum with a flat head:
/// `A_0 = a0`, `A_l = C l₀^{−α}` for `0 < l < l₀`, `A_l = C l^{−α}` for `l ≥ l₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    alpha: f64,
    scale: f64,
    ell0: usize,
    a0: f64,
}

impl PowerSpectrum {
    /// `A_l = scale · l^{−alpha}` with `l₀ = 1` and `A_0 = scale`.
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        Self::with_head(alpha, scale, 1, scale)
    }

    pub fn with_head(alpha: f64, scale: f64, ell0: usize, a0: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(domain("spectral decay exponent", alpha));
        }
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(domain("spectral scale", scale));
        }
        if ell0 == 0 {
            return Err(domain("pre-asymptotic cutoff", 0.0));
        }
        if !(a0.is_finite() && a0 >= 0.0) {
            return Err(domain("zero-degree variance", a0));
        }
        Ok(Self {
            alpha,
            scale,
            ell0,
            a0,
        })
    }

    /// The spectrum of vanishing noise.
    pub fn zero() -> Self {
        Self {
            alpha: 1.0,
            scale: 0.0,
            ell0: 1,
            a0: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0 && self.a0 == 0.0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn ell0(&self) -> usize {
        self.ell0
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// `A_l`.
    pub fn eval(&self, ell: usize) -> f64 {
        match ell {
            0 => self.a0,
            l => self.scale * (l.max(self.ell0) as f64).powf(-self.alpha),
        }
    }
}

/// `(Σ (1 + l(l+d−2))^s c²)^{1/2}`.
pub fn sobolev_norm(f: &CoefficientField, s: f64) -> f64 {
    f.degree_norms_squared()
        .iter()
        .zip(f.eigenvalues())
        .map(|(c2, lam)| (1.0 + lam).powf(s) * c2)
        .sum::<f64>()
        .sqrt()
}

/// Per-coefficient variance of [`random_sobolev_data`] at degree `ell`:
/// `(1 + λ_l)^{−(β+1/2)} / h(l,d)`.
///
/// The `H^β` seminorm per degree then has mean `(1+λ_l)^{−1/2} ≈ l^{−1}`, so the
/// data sits at the edge of `H^β` and its band-`κ` truncation error decays
/// like `κ^{−β}` and no faster.
pub fn sobolev_variance(beta: f64, ell: usize, dim: usize) -> Result<f64> {
    let lam = eigenvalue_magnitude(ell, dim) as f64;
    let h = harmonic_dimension(ell, dim)? as f64;
    Ok((1.0 + lam).powf(-(beta + 0.5)) / h)
}

/// Random field of Sobolev regularity `beta` with i.i.d. Gaussian
/// coefficients of variance [`sobolev_variance`].
pub fn random_sobolev_data<R: Rng + ?Sized>(
    beta: f64,
    band: usize,
    dim: usize,
    rng: &mut R,
) -> Result<CoefficientField> {
    if !beta.is_finite() {
        return Err(domain("Sobolev exponent", beta));
    }
    let mut field = CoefficientField::zeros(band, dim)?;
    for ell in 0..=band {
        let sd = sobolev_variance(beta, ell, dim)?.sqrt();
        for v in field.degree_mut(ell) {
            let x: f64 = rng.sample(StandardNormal);
            *v = sd * x;
        }
    }
    Ok(field)
}

/// Initial position and velocity (or real and imaginary part) of a path.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    Zero,
    /// Independent [`random_sobolev_data`] draws; `None` leaves that slot at zero.
    RandomSobolev {
        beta: Option<f64>,
        gamma: Option<f64>,
    },
    /// Fixed coefficients, projected onto the band of the path.
    Fixed {
        first: CoefficientField,
        second: CoefficientField,
    },
}

impl InitialData {
    /// Realizes the data at band `band`. Random data draws the first slot
    /// before the second.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        band: usize,
        dim: usize,
        rng: &mut R,
    ) -> Result<(CoefficientField, CoefficientField)> {
        match self {
            InitialData::Zero => {
                let z = CoefficientField::zeros(band, dim)?;
                Ok((z.clone(), z))
            }
            InitialData::RandomSobolev { beta, gamma } => {
                let mut slot = |s: &Option<f64>| match s {
                    Some(s) => random_sobolev_data(*s, band, dim, rng),
                    None => CoefficientField::zeros(band, dim),
                };
                let first = slot(beta)?;
                let second = slot(gamma)?;
                Ok((first, second))
            }
            InitialData::Fixed { first, second } => {
                for f in [first, second] {
                    if f.dim() != dim {
                        return Err(crate::Error::DimensionMismatch(format!(
                            "initial data on d={} used for d={dim}",
                            f.dim()
                        )));
                    }
                }
                Ok((first.with_band(band), second.with_band(band)))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            InitialData::Zero => true,
            InitialData::RandomSobolev { beta, gamma } => beta.is_none() && gamma.is_none(),
            InitialData::Fixed { first, second } => first.norm() == 0.0 && second.norm() == 0.0,
        }
    }
}
