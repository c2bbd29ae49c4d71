//! Isotropic Gaussian random fields, Q-Wiener increments and the correlated
//! per-mode stochastic-convolution increments.
//!
//! Every sampler draws in the same order: degrees ascending, modes in storage
//! order within a degree, and for the convolution pair two normals `(X₁, X₂)`
//! per mode. Draws happen even where `A_l = 0`, so changing the spectrum never
//! shifts the random stream.

mod covariance;

pub use covariance::{
    schrodinger_conv_covariance, sin_squared, two_x_minus_sin, wave_conv_cholesky,
    wave_conv_covariance, CholeskyFactor, ConvCovariance, ConvFactorTable, Kernel, TAYLOR_SWITCH,
};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::spectrum::{CoefficientField, PowerSpectrum};

/// Band-limited isotropic field: each coefficient of degree `l` is `√A_l · N(0,1)`.
pub fn sample_isotropic_grf<R: Rng + ?Sized>(
    ps: &PowerSpectrum,
    band: usize,
    dim: usize,
    rng: &mut R,
) -> Result<CoefficientField> {
    let mut field = CoefficientField::zeros(band, dim)?;
    for ell in 0..=band {
        let sd = ps.eval(ell).sqrt();
        for v in field.degree_mut(ell) {
            let x: f64 = rng.sample(StandardNormal);
            *v = sd * x;
        }
    }
    Ok(field)
}

/// Q-Wiener increment over a step `h`: an isotropic field with spectrum `h A_l`.
pub fn wiener_increment<R: Rng + ?Sized>(
    ps: &PowerSpectrum,
    band: usize,
    dim: usize,
    h: f64,
    rng: &mut R,
) -> Result<CoefficientField> {
    if !(h.is_finite() && h > 0.0) {
        return Err(domain("time step", h));
    }
    let mut field = sample_isotropic_grf(ps, band, dim, rng)?;
    field.scale(h.sqrt());
    Ok(field)
}

/// Fills `(first, second)` with one draw of the convolution pair for every
/// mode: `√A_l Dᵀ_l (X₁, X₂)`, so each pair has covariance `A_l C_l(h)`.
pub fn sample_conv_increments_into<R: Rng + ?Sized>(
    ps: &PowerSpectrum,
    factors: &ConvFactorTable,
    rng: &mut R,
    first: &mut CoefficientField,
    second: &mut CoefficientField,
) -> Result<()> {
    first.check_same_shape(second)?;
    if first.band() != factors.band() || first.dim() != factors.dim() {
        return Err(Error::FactorMismatch(format!(
            "table for band {} / d={} used on band {} / d={}",
            factors.band(),
            factors.dim(),
            first.band(),
            first.dim()
        )));
    }
    for ell in 0..=factors.band() {
        let amp = ps.eval(ell).sqrt();
        let f = factors.factor(ell);
        let a = first.degree_mut(ell);
        let b = second.degree_mut(ell);
        for (u, v) in a.iter_mut().zip(b.iter_mut()) {
            let x1: f64 = rng.sample(StandardNormal);
            let x2: f64 = rng.sample(StandardNormal);
            let (w1, w2) = f.apply_transpose(x1, x2);
            *u = amp * w1;
            *v = amp * w2;
        }
    }
    Ok(())
}

/// Allocating form of [`sample_conv_increments_into`].
pub fn sample_conv_increments<R: Rng + ?Sized>(
    ps: &PowerSpectrum,
    factors: &ConvFactorTable,
    rng: &mut R,
) -> Result<(CoefficientField, CoefficientField)> {
    let mut first = CoefficientField::zeros(factors.band(), factors.dim())?;
    let mut second = first.clone();
    sample_conv_increments_into(ps, factors, rng, &mut first, &mut second)?;
    Ok((first, second))
}

/// Wave convolution increments `(Ŵ₁, Ŵ₂)` over a step `h`.
pub fn sample_wave_conv_increments<R: Rng + ?Sized>(
    ps: &PowerSpectrum,
    band: usize,
    dim: usize,
    h: f64,
    rng: &mut R,
    factors: &ConvFactorTable,
) -> Result<(CoefficientField, CoefficientField)> {
    factors.check(Kernel::Wave, h, band, dim)?;
    sample_conv_increments(ps, factors, rng)
}

/// Schrödinger convolution increments `(Ŵ_R, Ŵ_I)` over a step `h` on `S^2`.
pub fn sample_schrodinger_conv_increments<R: Rng + ?Sized>(
    ps: &PowerSpectrum,
    band: usize,
    h: f64,
    rng: &mut R,
    factors: &ConvFactorTable,
) -> Result<(CoefficientField, CoefficientField)> {
    factors.check(Kernel::Schrodinger, h, band, 3)?;
    sample_conv_increments(ps, factors, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Sample mean of `x·y` and its standard error.
    fn mean_product(xs: &[f64], ys: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let p: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x * y).collect();
        let mean = p.iter().sum::<f64>() / n;
        let var = p.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn zero_spectrum_gives_zero_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ps = PowerSpectrum::zero();
        assert_eq!(
            sample_isotropic_grf(&ps, 6, 3, &mut rng).unwrap().norm(),
            0.0
        );
        assert_eq!(
            wiener_increment(&ps, 6, 4, 0.5, &mut rng).unwrap().norm(),
            0.0
        );
        let table = ConvFactorTable::new(Kernel::Wave, 0.5, 6, 3).unwrap();
        let (a, b) = sample_wave_conv_increments(&ps, 6, 3, 0.5, &mut rng, &table).unwrap();
        assert_eq!(a.norm() + b.norm(), 0.0);
    }

    #[test]
    fn step_must_be_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ps = PowerSpectrum::new(3.0, 1.0).unwrap();
        assert!(wiener_increment(&ps, 2, 3, 0.0, &mut rng).is_err());
        assert!(wiener_increment(&ps, 2, 3, -1.0, &mut rng).is_err());
    }

    #[test]
    fn mismatched_table_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ps = PowerSpectrum::new(3.0, 1.0).unwrap();
        let table = ConvFactorTable::new(Kernel::Wave, 0.5, 6, 3).unwrap();
        assert!(sample_wave_conv_increments(&ps, 6, 3, 0.25, &mut rng, &table).is_err());
        assert!(sample_wave_conv_increments(&ps, 5, 3, 0.5, &mut rng, &table).is_err());
        assert!(sample_schrodinger_conv_increments(&ps, 6, 0.5, &mut rng, &table).is_err());
        let mut a = CoefficientField::sphere(5);
        let mut b = CoefficientField::sphere(5);
        assert!(sample_conv_increments_into(&ps, &table, &mut rng, &mut a, &mut b).is_err());
    }

    #[test]
    fn grf_degree_variance() {
        let ps = PowerSpectrum::new(3.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut by_degree: Vec<Vec<f64>> = (0..17).map(|_| Vec::with_capacity(n)).collect();
        for _ in 0..n {
            let f = sample_isotropic_grf(&ps, 16, 3, &mut rng).unwrap();
            for (ell, col) in by_degree.iter_mut().enumerate() {
                col.push(f.degree(ell)[0]);
            }
        }
        for (ell, col) in by_degree.iter().enumerate() {
            let (var, se) = mean_product(col, col);
            assert!(
                (var - ps.eval(ell)).abs() < 3.0 * se,
                "l={ell}: {var} vs {}",
                ps.eval(ell)
            );
        }
    }

    #[test]
    fn wiener_variance_is_linear_in_step() {
        let ps = PowerSpectrum::new(3.0, 1.0).unwrap();
        let n = 100_000;
        let collect = |h: f64, seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| wiener_increment(&ps, 2, 3, h, &mut rng).unwrap().degree(1)[1])
                .collect::<Vec<_>>()
        };
        let (v1, s1) = {
            let x = collect(0.01, 1);
            mean_product(&x, &x)
        };
        let (v2, s2) = {
            let x = collect(0.04, 2);
            mean_product(&x, &x)
        };
        let ratio = v2 / v1;
        // delta-method standard error of the ratio
        let se = ratio * ((s1 / v1).powi(2) + (s2 / v2).powi(2)).sqrt();
        assert!((ratio - 4.0).abs() < 3.0 * se, "ratio {ratio} ± {se}");
        // one step of length T has the Wiener variance T·A_l
        assert!((v2 - 0.04 * ps.eval(1)).abs() < 3.0 * s2);
    }

    fn check_pair_covariance(kernel: Kernel, ell: usize, h: f64, a: f64, seed: u64) {
        let ps = PowerSpectrum::with_head(3.0, a, 1, a).unwrap();
        let band = ell;
        let table = ConvFactorTable::new(kernel, h, band, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 100_000;
        let (mut xs, mut ys) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let mut first = CoefficientField::sphere(band);
        let mut second = CoefficientField::sphere(band);
        for _ in 0..n {
            sample_conv_increments_into(&ps, &table, &mut rng, &mut first, &mut second).unwrap();
            let k = first.offset(ell);
            xs.push(first.values()[k]);
            ys.push(second.values()[k]);
        }
        let c = ConvCovariance::new(kernel, ell, 3, h).unwrap();
        let al = ps.eval(ell);
        let (m11, s11) = mean_product(&xs, &xs);
        let (m12, s12) = mean_product(&xs, &ys);
        let (m22, s22) = mean_product(&ys, &ys);
        assert!(
            (m11 - al * c.c11).abs() <= 3.0 * s11,
            "{kernel:?} c11 {m11} vs {}",
            al * c.c11
        );
        assert!(
            (m12 - al * c.c12).abs() <= 3.0 * s12,
            "{kernel:?} c12 {m12} vs {}",
            al * c.c12
        );
        assert!(
            (m22 - al * c.c22).abs() <= 3.0 * s22,
            "{kernel:?} c22 {m22} vs {}",
            al * c.c22
        );
    }

    #[test]
    fn increment_covariance_zero_degree() {
        check_pair_covariance(Kernel::Wave, 0, 1.0, 1.0, 5);
        check_pair_covariance(Kernel::Wave, 0, 1.0, 2.5, 6);
    }

    #[test]
    fn increment_covariance_degree_four() {
        check_pair_covariance(Kernel::Wave, 4, 0.1, 1.0, 7);
        check_pair_covariance(Kernel::Schrodinger, 4, 0.1, 1.0, 8);
        check_pair_covariance(Kernel::Schrodinger, 1, 1.0, 1.0, 9);
    }
}
