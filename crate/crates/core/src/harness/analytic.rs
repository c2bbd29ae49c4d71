use crate::error::{Error, Result};
use crate::harmonics::{eigenvalue_magnitude, harmonic_dimension};
use crate::noise::{ConvCovariance, Kernel};
use crate::spectrum::{sobolev_variance, InitialData, PowerSpectrum};

use super::Equation;

/// Deterministic 2×2 flow of one mode over time `t`.
fn flow(equation: Equation, ell: usize, dim: usize, t: f64) -> [[f64; 2]; 2] {
    let lam = eigenvalue_magnitude(ell, dim) as f64;
    let root = lam.sqrt();
    let (s, c) = (root * t).sin_cos();
    match equation {
        Equation::Wave if ell == 0 => [[1.0, t], [0.0, 1.0]],
        Equation::Wave => [[c, s / root], [-root * s, c]],
        Equation::Schrodinger => [[c, s], [-s, c]],
    }
}

/// `(E|u₁ coefficients of degree l|², E|u₂ …|²)` summed over the degree, for
/// every `l ≤ band`, at time `t`.
pub fn second_moment_by_degree(
    equation: Equation,
    spectrum: &PowerSpectrum,
    band: usize,
    t: f64,
    dim: usize,
    initial: &InitialData,
) -> Result<Vec<(f64, f64)>> {
    if equation == Equation::Schrodinger && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let kernel = match equation {
        Equation::Wave => Kernel::Wave,
        Equation::Schrodinger => Kernel::Schrodinger,
    };
    if let InitialData::Fixed { first, second } = initial {
        if first.dim() != dim || second.dim() != dim {
            return Err(Error::DimensionMismatch("initial data dimension".into()));
        }
    }
    (0..=band)
        .map(|ell| {
            let h = harmonic_dimension(ell, dim)? as f64;
            let c = ConvCovariance::new(kernel, ell, dim, t)?;
            let a = spectrum.eval(ell);
            let mut first = h * a * c.c11;
            let mut second = h * a * c.c22;
            let m = flow(equation, ell, dim, t);
            match initial {
                InitialData::Zero => {}
                InitialData::RandomSobolev { beta, gamma } => {
                    let var = |s: &Option<f64>| -> Result<f64> {
                        Ok(match s {
                            Some(s) => h * sobolev_variance(*s, ell, dim)?,
                            None => 0.0,
                        })
                    };
                    let (v1, v2) = (var(beta)?, var(gamma)?);
                    first += m[0][0].powi(2) * v1 + m[0][1].powi(2) * v2;
                    second += m[1][0].powi(2) * v1 + m[1][1].powi(2) * v2;
                }
                InitialData::Fixed {
                    first: p,
                    second: q,
                } => {
                    let pa = if ell <= p.band() {
                        p.degree(ell)
                    } else {
                        &[][..]
                    };
                    let qa = if ell <= q.band() {
                        q.degree(ell)
                    } else {
                        &[][..]
                    };
                    for k in 0..pa.len().max(qa.len()) {
                        let x = pa.get(k).copied().unwrap_or(0.0);
                        let y = qa.get(k).copied().unwrap_or(0.0);
                        first += (m[0][0] * x + m[0][1] * y).powi(2);
                        second += (m[1][0] * x + m[1][1] * y).powi(2);
                    }
                }
            }
            Ok((first, second))
        })
        .collect()
}

/// `(E‖u₁^κ(t)‖², E‖u₂^κ(t)‖²)` in closed form.
pub fn analytic_second_moment(
    equation: Equation,
    spectrum: &PowerSpectrum,
    band: usize,
    t: f64,
    dim: usize,
    initial: &InitialData,
) -> Result<(f64, f64)> {
    let per = second_moment_by_degree(equation, spectrum, band, t, dim, initial)?;
    Ok(per
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1)))
}
