use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::harmonics::eigenvalue_magnitude;

/// Below this value of `x = √λ t` the cancellation-prone terms are summed
/// from their Taylor series.
pub const TAYLOR_SWITCH: f64 = 1e-3;

/// Time kernel of the stochastic convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// `(λ^{−1/2} sin(√λ s), cos(√λ s))`, the wave propagator acting on the velocity slot.
    Wave,
    /// `(sin(√λ s), cos(√λ s))`, the free Schrödinger rotation.
    Schrodinger,
}

/// `2x − sin 2x`.
pub fn two_x_minus_sin(x: f64) -> f64 {
    if x < TAYLOR_SWITCH {
        let y = 2.0 * x;
        let y2 = y * y;
        // y³/3! − y⁵/5! + y⁷/7! − y⁹/9! + y¹¹/11!
        y * y2
            * (1.0 / 6.0
                - y2 * (1.0 / 120.0
                    - y2 * (1.0 / 5040.0 - y2 * (1.0 / 362_880.0 - y2 / 39_916_800.0))))
    } else {
        2.0 * x - (2.0 * x).sin()
    }
}

/// `sin² x`.
pub fn sin_squared(x: f64) -> f64 {
    if x < TAYLOR_SWITCH {
        let y = 2.0 * x;
        let y2 = y * y;
        // Σ_{k≥1} (−1)^{k+1} y^{2k} / (2 (2k)!)
        y2 * (1.0 / 4.0
            - y2 * (1.0 / 48.0 - y2 * (1.0 / 1440.0 - y2 * (1.0 / 80_640.0 - y2 / 7_257_600.0))))
    } else {
        let s = x.sin();
        s * s
    }
}

/// Covariance `C(t)` of the per-mode stochastic convolution pair driven by a
/// unit-variance Brownian motion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvCovariance {
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
    /// Eigenvalue magnitude `l(l+d−2)`.
    pub lambda: f64,
    pub t: f64,
}

impl ConvCovariance {
    pub fn new(kernel: Kernel, ell: usize, dim: usize, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(domain("convolution time", t));
        }
        if dim < 3 {
            return Err(Error::InvalidDimension(dim));
        }
        let lambda = eigenvalue_magnitude(ell, dim) as f64;
        let (c11, c12, c22) = if ell == 0 {
            match kernel {
                Kernel::Wave => (t * t * t / 3.0, t * t / 2.0, t),
                Kernel::Schrodinger => (0.0, 0.0, t),
            }
        } else {
            let root = lambda.sqrt();
            let x = root * t;
            let minus = two_x_minus_sin(x);
            let plus = 2.0 * x + (2.0 * x).sin();
            let sq = sin_squared(x);
            match kernel {
                Kernel::Wave => (
                    minus / (4.0 * lambda * root),
                    sq / (2.0 * lambda),
                    plus / (4.0 * root),
                ),
                Kernel::Schrodinger => {
                    (minus / (4.0 * root), sq / (2.0 * root), plus / (4.0 * root))
                }
            }
        };
        Ok(Self {
            c11,
            c12,
            c22,
            lambda,
            t,
        })
    }

    pub fn determinant(&self) -> f64 {
        self.c11 * self.c22 - self.c12 * self.c12
    }

    pub fn frobenius(&self) -> f64 {
        (self.c11 * self.c11 + 2.0 * self.c12 * self.c12 + self.c22 * self.c22).sqrt()
    }

    /// Upper-triangular factor `D` with `DᵀD = C`.
    pub fn cholesky(&self) -> CholeskyFactor {
        let d11 = self.c11.max(0.0).sqrt();
        let d12 = if d11 > 0.0 { self.c12 / d11 } else { 0.0 };
        let d22 = (self.c22 - d12 * d12).max(0.0).sqrt();
        CholeskyFactor { d11, d12, d22 }
    }
}

/// `C_l(t)` for the wave kernel on `S^{d−1}`.
pub fn wave_conv_covariance(ell: usize, dim: usize, t: f64) -> Result<ConvCovariance> {
    ConvCovariance::new(Kernel::Wave, ell, dim, t)
}

/// Factor of [`wave_conv_covariance`].
pub fn wave_conv_cholesky(ell: usize, dim: usize, t: f64) -> Result<CholeskyFactor> {
    Ok(wave_conv_covariance(ell, dim, t)?.cholesky())
}

/// `C̃_l(t)` for the Schrödinger kernel on `S^2`.
pub fn schrodinger_conv_covariance(ell: usize, t: f64) -> Result<ConvCovariance> {
    ConvCovariance::new(Kernel::Schrodinger, ell, 3, t)
}

/// Upper-triangular `D = [[d11, d12], [0, d22]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CholeskyFactor {
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl CholeskyFactor {
    /// Entries `(c11, c12, c22)` of `DᵀD`.
    pub fn reconstruct(&self) -> (f64, f64, f64) {
        (
            self.d11 * self.d11,
            self.d11 * self.d12,
            self.d12 * self.d12 + self.d22 * self.d22,
        )
    }

    /// `Dᵀ (x1, x2)`.
    #[inline]
    pub fn apply_transpose(&self, x1: f64, x2: f64) -> (f64, f64) {
        (self.d11 * x1, self.d12 * x1 + self.d22 * x2)
    }
}

/// Factors `D_l(h)` for every degree up to a band, for one kernel and step.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvFactorTable {
    kernel: Kernel,
    step: f64,
    band: usize,
    dim: usize,
    factors: Vec<CholeskyFactor>,
}

impl ConvFactorTable {
    pub fn new(kernel: Kernel, step: f64, band: usize, dim: usize) -> Result<Self> {
        if kernel == Kernel::Schrodinger && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let factors = (0..=band)
            .map(|ell| Ok(ConvCovariance::new(kernel, ell, dim, step)?.cholesky()))
            .collect::<Result<_>>()?;
        Ok(Self {
            kernel,
            step,
            band,
            dim,
            factors,
        })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor(&self, ell: usize) -> &CholeskyFactor {
        &self.factors[ell]
    }

    pub fn factors(&self) -> &[CholeskyFactor] {
        &self.factors
    }

    /// Fails unless the table was built for exactly this configuration.
    pub fn check(&self, kernel: Kernel, step: f64, band: usize, dim: usize) -> Result<()> {
        if self.kernel != kernel || self.step != step || self.band != band || self.dim != dim {
            return Err(Error::FactorMismatch(format!(
                "table ({:?}, h={}, band {}, d={}) used for ({kernel:?}, h={step}, band {band}, d={dim})",
                self.kernel, self.step, self.band, self.dim
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Adaptive Simpson quadrature, the independent oracle for the closed forms.
    fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        // (a, b, f(a), f(mid), f(b), Simpson estimate, tolerance, depth left)
        let simpson =
            |a: f64, b: f64, fa: f64, fm: f64, fb: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        let mut stack = vec![(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50u32)];
        let mut total = 0.0;
        while let Some((a, b, fa, fm, fb, whole, tol, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
            let left = simpson(a, m, fa, flm, fm);
            let right = simpson(m, b, fm, frm, fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                total += left + right + delta / 15.0;
            } else {
                stack.push((a, m, fa, flm, fm, left, tol / 2.0, depth - 1));
                stack.push((m, b, fm, frm, fb, right, tol / 2.0, depth - 1));
            }
        }
        total
    }

    fn quadrature_covariance(kernel: Kernel, ell: usize, dim: usize, t: f64) -> (f64, f64, f64) {
        let lam = eigenvalue_magnitude(ell, dim) as f64;
        let root = lam.sqrt();
        let r1 = move |s: f64| match (kernel, ell) {
            (Kernel::Wave, 0) => s,
            (Kernel::Wave, _) => (root * s).sin() / root,
            (Kernel::Schrodinger, _) => (root * s).sin(),
        };
        let r2 = move |s: f64| (root * s).cos();
        // split into pieces of at most one oscillation for robust adaptivity
        let pieces = ((root * t / 2.0).ceil() as usize).max(1);
        let mut out = (0.0, 0.0, 0.0);
        for k in 0..pieces {
            let a = t * k as f64 / pieces as f64;
            let b = t * (k + 1) as f64 / pieces as f64;
            out.0 += adaptive_simpson(&|s| r1(s) * r1(s), a, b, 1e-13);
            out.1 += adaptive_simpson(&|s| r1(s) * r2(s), a, b, 1e-13);
            out.2 += adaptive_simpson(&|s| r2(s) * r2(s), a, b, 1e-13);
        }
        out
    }

    #[test]
    fn zero_degree_wave_matrix() {
        let c = wave_conv_covariance(0, 3, 1.0).unwrap();
        assert_relative_eq!(c.c11, 1.0 / 3.0, epsilon = 1e-16);
        assert_relative_eq!(c.c12, 0.5, epsilon = 1e-16);
        assert_relative_eq!(c.c22, 1.0, epsilon = 1e-16);
        let d = c.cholesky();
        assert_relative_eq!(d.d11, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(d.d12, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(d.d22, 0.5, epsilon = 1e-15);
        // D_0(t) = t^{1/2} [[t/√3, √3/2], [0, 1/2]] at t = 4
        let d = wave_conv_cholesky(0, 3, 4.0).unwrap();
        assert_relative_eq!(d.d11, 2.0 * 4.0 / 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(d.d12, 2.0 * 3f64.sqrt() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(d.d22, 2.0 * 0.5, max_relative = 1e-15);
    }

    #[test]
    fn degree_one_wave_entries() {
        let c = wave_conv_covariance(1, 3, 1.0).unwrap();
        // 60-digit reference values
        assert_relative_eq!(c.c11, 0.222_770_047_735_391_97, max_relative = 1e-14);
        assert_relative_eq!(c.c12, 0.243_920_391_015_730_93, max_relative = 1e-14);
        assert_relative_eq!(c.c22, 0.554_459_904_529_216, max_relative = 1e-14);
        assert_relative_eq!(c.c12, 2f64.sqrt().sin().powi(2) / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn degree_one_factor_matches_explicit_formulas() {
        let t = 1.0;
        let lam: f64 = 2.0;
        let x = lam.sqrt() * t;
        let m = 2.0 * x - (2.0 * x).sin();
        let d11 = m.sqrt() / (2.0 * lam.powf(0.75));
        let d12 = x.sin().powi(2) / (lam.powf(0.25) * m.sqrt());
        let d22 = ((4.0 * lam * t * t - (2.0 * x).sin().powi(2) - 4.0 * x.sin().powi(4))
            / (4.0 * lam.sqrt() * m))
            .sqrt();
        let d = wave_conv_cholesky(1, 3, t).unwrap();
        assert!((d.d11 - d11).abs() < 1e-12);
        assert!((d.d12 - d12).abs() < 1e-12);
        assert!((d.d22 - d22).abs() < 1e-12);
    }

    #[test]
    fn schrodinger_examples() {
        let c = schrodinger_conv_covariance(0, 2.0).unwrap();
        assert_eq!((c.c11, c.c12, c.c22), (0.0, 0.0, 2.0));
        let d = c.cholesky();
        assert_eq!((d.d11, d.d12), (0.0, 0.0));
        assert_relative_eq!(d.d22, 2f64.sqrt(), epsilon = 1e-15);
        for ell in 1..40 {
            for t in [1e-5, 0.3, 1.0, 7.0] {
                let c = schrodinger_conv_covariance(ell, t).unwrap();
                assert!((c.c11 + c.c22 - t).abs() <= 1e-13 * t.max(1.0));
            }
        }
    }

    #[test]
    fn entries_match_quadrature() {
        for kernel in [Kernel::Wave, Kernel::Schrodinger] {
            for ell in [0usize, 1, 2, 5, 17, 64] {
                for t in [1e-3, 0.1, 1.0, 3.0] {
                    let c = ConvCovariance::new(kernel, ell, 3, t).unwrap();
                    let q = quadrature_covariance(kernel, ell, 3, t);
                    assert!((c.c11 - q.0).abs() < 1e-8, "{kernel:?} l={ell} t={t}");
                    assert!((c.c12 - q.1).abs() < 1e-8, "{kernel:?} l={ell} t={t}");
                    assert!((c.c22 - q.2).abs() < 1e-8, "{kernel:?} l={ell} t={t}");
                }
            }
        }
        for d in [4, 7] {
            let c = wave_conv_covariance(3, d, 0.7).unwrap();
            let q = quadrature_covariance(Kernel::Wave, 3, d, 0.7);
            assert!((c.c11 - q.0).abs() < 1e-8 && (c.c12 - q.1).abs() < 1e-8);
            assert!((c.c22 - q.2).abs() < 1e-8);
        }
    }

    #[test]
    fn taylor_branch_continuity() {
        let x = TAYLOR_SWITCH;
        let direct = 2.0 * x - (2.0 * x).sin();
        let series = two_x_minus_sin(x * (1.0 - f64::EPSILON));
        assert!((series - direct).abs() <= 1e-10 * direct);
        let direct = x.sin().powi(2);
        let series = sin_squared(x * (1.0 - f64::EPSILON));
        assert!((series - direct).abs() <= 1e-10 * direct);
        // deep in the series branch the result keeps full relative accuracy
        let tiny = 1e-7;
        assert_relative_eq!(
            two_x_minus_sin(tiny),
            8.0 * tiny.powi(3) / 6.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn small_step_factors_are_valid() {
        for ell in [1usize, 2, 3] {
            let c = wave_conv_covariance(ell, 3, 1e-6).unwrap();
            assert!(c.determinant() > 0.0);
            let d = c.cholesky();
            // d22² → t/4 as t → 0
            assert_relative_eq!(d.d22 * d.d22, 0.25e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn reconstruction_relative_error() {
        for kernel in [Kernel::Wave, Kernel::Schrodinger] {
            for ell in 0..=512 {
                for t in [1e-6, 1e-4, 1e-3, 1e-2, 1.0, 10.0] {
                    let c = ConvCovariance::new(kernel, ell, 3, t).unwrap();
                    let (r11, r12, r22) = c.cholesky().reconstruct();
                    let err = ((r11 - c.c11).powi(2)
                        + 2.0 * (r12 - c.c12).powi(2)
                        + (r22 - c.c22).powi(2))
                    .sqrt();
                    assert!(err <= 1e-12 * c.frobenius(), "{kernel:?} l={ell} t={t}");
                }
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(wave_conv_covariance(1, 3, 0.0).is_err());
        assert!(wave_conv_covariance(1, 3, -1.0).is_err());
        assert!(wave_conv_covariance(1, 2, 1.0).is_err());
        assert!(schrodinger_conv_covariance(1, f64::NAN).is_err());
        assert!(ConvFactorTable::new(Kernel::Schrodinger, 0.1, 4, 4).is_err());
        let table = ConvFactorTable::new(Kernel::Wave, 0.1, 4, 3).unwrap();
        assert!(table.check(Kernel::Wave, 0.1, 4, 3).is_ok());
        assert!(table.check(Kernel::Wave, 0.2, 4, 3).is_err());
        assert!(table.check(Kernel::Schrodinger, 0.1, 4, 3).is_err());
        assert!(table.check(Kernel::Wave, 0.1, 5, 3).is_err());
    }

    proptest! {
        #[test]
        fn covariances_are_psd(ell in 0usize..=512, log_t in -6.0f64..1.0, d in 3usize..6) {
            let t = 10f64.powf(log_t);
            for kernel in [Kernel::Wave, Kernel::Schrodinger] {
                if kernel == Kernel::Schrodinger && d != 3 {
                    continue;
                }
                let c = ConvCovariance::new(kernel, ell, d, t).unwrap();
                prop_assert!(c.c11 >= 0.0 && c.c22 >= 0.0);
                prop_assert!(c.determinant() >= -1e-14 * c.c11 * c.c22);
            }
        }
    }
}
