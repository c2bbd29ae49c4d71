//! Legendre functions, the real orthonormal spherical-harmonic basis on `S^2`,
//! Gauss–Legendre sphere grids and synthesis of coefficient fields on them.
//!
//! The real basis used throughout the crate is
//! `{ L_{l,0}(θ), √2 L_{l,m}(θ) cos(mφ), √2 L_{l,m}(θ) sin(mφ) : 1 ≤ m ≤ l }`
//! where `L_{l,m}(θ) = sqrt((2l+1)/(4π) (l-m)!/(l+m)!) P_{l,m}(cos θ)` and
//! `P_{l,m}` carries the Condon–Shortley phase `(-1)^m`.

mod grid;
mod synthesis;

pub use grid::{gauss_legendre, GridField, SphereGrid};
pub use synthesis::{grid_l2_norm, grid_max_abs, synthesize, Synthesizer};

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

fn check_unit(mu: f64) -> Result<()> {
    if mu.is_nan() || mu.abs() > 1.0 {
        return Err(domain("legendre argument", mu));
    }
    Ok(())
}

/// Legendre polynomial `P_l(μ)` by the three-term recurrence
/// `(n+1) P_{n+1} = (2n+1) μ P_n − n P_{n−1}`.
pub fn legendre(ell: usize, mu: f64) -> Result<f64> {
    check_unit(mu)?;
    if ell == 0 {
        return Ok(1.0);
    }
    let (mut prev, mut cur) = (1.0, mu);
    for n in 1..ell {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * mu * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Associated Legendre function `P_{l,m}(μ) = (−1)^m (1−μ²)^{m/2} d^m/dμ^m P_l(μ)`.
///
/// Unnormalized, so it overflows for large `m` (the seed `(2m−1)!!` grows
/// factorially); use [`normalized_legendre`] beyond moderate degrees.
pub fn assoc_legendre(ell: usize, m: usize, mu: f64) -> Result<f64> {
    check_unit(mu)?;
    if m > ell {
        return Err(Error::InvalidOrder { ell, m });
    }
    let sin = ((1.0 - mu) * (1.0 + mu)).sqrt();
    // P_{m,m} = (−1)^m (2m−1)!! (1−μ²)^{m/2}
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * sin;
    }
    if ell == m {
        return Ok(pmm);
    }
    let mut prev = pmm;
    let mut cur = mu * (2 * m + 1) as f64 * pmm;
    for n in (m + 2)..=ell {
        let next = ((2 * n - 1) as f64 * mu * cur - (n + m - 1) as f64 * prev) / (n - m) as f64;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Recurrence coefficients for the orthonormal functions `L_{l,m}` at fixed `m`:
/// `L_{l,m} = a (μ L_{l−1,m} − b L_{l−2,m})`.
#[inline]
fn ortho_coeffs(ell: usize, m: usize) -> (f64, f64) {
    let l2 = (ell * ell) as f64;
    let m2 = (m * m) as f64;
    let a = ((4.0 * l2 - 1.0) / (l2 - m2)).sqrt();
    let lm1 = (ell - 1) as f64;
    let b = ((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
    (a, b)
}

/// Orthonormal associated Legendre function `L_{l,m}(θ)`.
///
/// The factorial ratio is never formed; the normalization is carried through
/// the recurrence, so this stays finite for degrees in the thousands.
pub fn normalized_legendre(ell: usize, m: usize, theta: f64) -> Result<f64> {
    if theta.is_nan() || !(0.0..=PI).contains(&theta) {
        return Err(domain("colatitude", theta));
    }
    if m > ell {
        return Err(Error::InvalidOrder { ell, m });
    }
    let (sin, mu) = theta.sin_cos();
    let sin = sin.max(0.0);
    let mut lmm = 0.5 / PI.sqrt();
    for k in 1..=m {
        let k = k as f64;
        lmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * sin;
    }
    if ell == m {
        return Ok(lmm);
    }
    let mut prev = lmm;
    let mut cur = (2.0 * m as f64 + 3.0).sqrt() * mu * lmm;
    for n in (m + 2)..=ell {
        let (a, b) = ortho_coeffs(n, m);
        let next = a * (mu * cur - b * prev);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// All `L_{l,m}(θ)` for `0 ≤ m ≤ l ≤ band` at one colatitude, packed
/// as `l(l+1)/2 + m`.
pub fn normalized_legendre_table(band: usize, theta: f64) -> Result<Vec<f64>> {
    if theta.is_nan() || !(0.0..=PI).contains(&theta) {
        return Err(domain("colatitude", theta));
    }
    let mut out = vec![0.0; (band + 1) * (band + 2) / 2];
    fill_legendre_table(band, theta, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn tri_index(ell: usize, m: usize) -> usize {
    ell * (ell + 1) / 2 + m
}

pub(crate) fn fill_legendre_table(band: usize, theta: f64, out: &mut [f64]) {
    let (sin, mu) = theta.sin_cos();
    let sin = sin.max(0.0);
    let mut lmm = 0.5 / PI.sqrt();
    for m in 0..=band {
        if m > 0 {
            let k = m as f64;
            lmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * sin;
        }
        out[tri_index(m, m)] = lmm;
        if m == band {
            break;
        }
        let mut prev = lmm;
        let mut cur = (2.0 * m as f64 + 3.0).sqrt() * mu * lmm;
        out[tri_index(m + 1, m)] = cur;
        for n in (m + 2)..=band {
            let (a, b) = ortho_coeffs(n, m);
            let next = a * (mu * cur - b * prev);
            out[tri_index(n, m)] = next;
            prev = cur;
            cur = next;
        }
    }
}

/// Integer eigenvalue magnitude `l(l+d−2)` of `−Δ` on `S^{d−1}`.
#[inline]
pub fn eigenvalue_magnitude(ell: usize, d: usize) -> u64 {
    (ell as u64) * (ell as u64 + d as u64 - 2)
}

/// Eigenvalue `−l(l+d−2)` of the Laplace–Beltrami operator on `S^{d−1}`.
pub fn laplacian_eigenvalue(ell: usize, d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(-(eigenvalue_magnitude(ell, d) as f64))
}

/// Dimension `h(l,d) = (2l+d−2) (l+d−3)! / ((d−2)! l!)` of the degree-`l`
/// eigenspace on `S^{d−1}`, computed exactly.
pub fn harmonic_dimension(ell: usize, d: usize) -> Result<usize> {
    if d < 3 {
        return Err(Error::InvalidDimension(d));
    }
    let overflow = || Error::Overflow { ell, d };
    // C(l+d−3, l), exact at every step of the product.
    let n = (ell + d - 3) as u128;
    let k = ell.min(d - 3) as u128;
    let mut binom: u128 = 1;
    for i in 0..k {
        binom = binom.checked_mul(n - i).ok_or_else(overflow)? / (i + 1);
    }
    let h = binom
        .checked_mul((2 * ell + d - 2) as u128)
        .ok_or_else(overflow)?
        / (d - 2) as u128;
    usize::try_from(h).map_err(|_| overflow())
}
