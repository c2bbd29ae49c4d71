use std::f64::consts::SQRT_2;
use std::sync::Arc;

use super::{fill_legendre_table, tri_index, GridField, SphereGrid};
use crate::error::{Error, Result};
use crate::spectrum::CoefficientField;

/// Precomputed Legendre and trigonometric tables for evaluating band-limited
/// real-basis expansions on a fixed grid.
///
/// Synthesis separates the sums: for every colatitude the `l`-sums
/// `a_m(θ) = Σ_l c_{l,m} L_{l,m}(θ)` cost `O(κ²)`, then the `m`-sums over
/// longitude cost `O(κ n_φ)`.
#[derive(Clone, Debug)]
pub struct Synthesizer {
    grid: Arc<SphereGrid>,
    band: usize,
    /// `n_theta` rows of packed `L_{l,m}(θ_i)`.
    legendre: Vec<f64>,
    /// `n_phi` rows of `cos(mφ_j)` / `sin(mφ_j)` for `m = 0..=band`.
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Synthesizer {
    pub fn new(grid: Arc<SphereGrid>, band: usize) -> Self {
        let tri = (band + 1) * (band + 2) / 2;
        let mut legendre = vec![0.0; grid.n_theta() * tri];
        for (row, &theta) in legendre.chunks_mut(tri).zip(grid.theta()) {
            fill_legendre_table(band, theta, row);
        }
        let mut cos = Vec::with_capacity(grid.n_phi() * (band + 1));
        let mut sin = Vec::with_capacity(grid.n_phi() * (band + 1));
        for &phi in grid.phi() {
            for m in 0..=band {
                let (s, c) = (m as f64 * phi).sin_cos();
                cos.push(c);
                sin.push(s);
            }
        }
        Self {
            grid,
            band,
            legendre,
            cos,
            sin,
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn band(&self) -> usize {
        self.band
    }

    /// Evaluates the whole field on the grid.
    pub fn synthesize(&self, field: &CoefficientField) -> Result<GridField> {
        self.synthesize_degrees(field, 0, field.band())
    }

    /// Evaluates only degrees `lo..=hi` of `field`; the other degrees are
    /// treated as zero. Used for truncation tails.
    pub fn synthesize_degrees(
        &self,
        field: &CoefficientField,
        lo: usize,
        hi: usize,
    ) -> Result<GridField> {
        if field.dim() != 3 {
            return Err(Error::UnsupportedDimension(field.dim()));
        }
        let hi = hi.min(field.band());
        if hi > self.band {
            return Err(Error::DimensionMismatch(format!(
                "synthesizer band {} is below field degree {hi}",
                self.band
            )));
        }
        let n_phi = self.grid.n_phi();
        let tri = (self.band + 1) * (self.band + 2) / 2;
        let stride = self.band + 1;
        let mut values = vec![0.0; self.grid.n_theta() * n_phi];
        if lo > hi {
            return GridField::new(self.grid.clone(), values);
        }
        let mut a = vec![0.0; hi + 1];
        let mut b = vec![0.0; hi + 1];
        for (i, row) in values.chunks_mut(n_phi).enumerate() {
            let leg = &self.legendre[i * tri..(i + 1) * tri];
            a.iter_mut().for_each(|v| *v = 0.0);
            b.iter_mut().for_each(|v| *v = 0.0);
            for ell in lo..=hi {
                let block = field.degree(ell);
                a[0] += block[0] * leg[tri_index(ell, 0)];
                for m in 1..=ell {
                    let l = leg[tri_index(ell, m)];
                    a[m] += block[2 * m - 1] * l;
                    b[m] += block[2 * m] * l;
                }
            }
            for (j, out) in row.iter_mut().enumerate() {
                let cos = &self.cos[j * stride..];
                let sin = &self.sin[j * stride..];
                let mut acc = 0.0;
                for m in 1..=hi {
                    acc += a[m] * cos[m] + b[m] * sin[m];
                }
                *out = a[0] + SQRT_2 * acc;
            }
        }
        GridField::new(self.grid.clone(), values)
    }
}

/// Pointwise evaluation of a real-basis expansion on a grid (`d = 3` only).
pub fn synthesize(coeffs: &CoefficientField, grid: &SphereGrid) -> Result<GridField> {
    if coeffs.dim() != 3 {
        return Err(Error::UnsupportedDimension(coeffs.dim()));
    }
    Synthesizer::new(Arc::new(grid.clone()), coeffs.band()).synthesize(coeffs)
}

/// Quadrature `L²(S²)` norm.
pub fn grid_l2_norm(field: &GridField) -> f64 {
    let grid = field.grid();
    let n_phi = grid.n_phi();
    field
        .values()
        .chunks(n_phi)
        .enumerate()
        .map(|(i, row)| grid.weight(i) * row.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// Maximum absolute value over all grid points.
pub fn grid_max_abs(field: &GridField) -> f64 {
    field
        .values()
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Component;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(band: usize, seed: u64) -> CoefficientField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = CoefficientField::sphere(band);
        f.values_mut()
            .iter_mut()
            .for_each(|v| *v = rng.random_range(-1.0..1.0));
        f
    }

    #[test]
    fn constant_and_dipole() {
        let grid = SphereGrid::gauss_legendre(8, 9).unwrap();
        let mut c = CoefficientField::sphere(2);
        c.set(0, 0, Component::Zonal, 1.0).unwrap();
        let f = synthesize(&c, &grid).unwrap();
        for v in f.values() {
            assert!((v - 0.5 / PI.sqrt()).abs() < 1e-15);
        }
        assert!(grid_l2_norm(&f) - 1.0 < 1e-14);

        let mut c = CoefficientField::sphere(1);
        c.set(1, 0, Component::Zonal, 1.0).unwrap();
        let f = synthesize(&c, &grid).unwrap();
        for i in 0..grid.n_theta() {
            let expect = (3.0 / (4.0 * PI)).sqrt() * grid.theta()[i].cos();
            assert!((f.get(i, 3) - expect).abs() < 1e-14);
        }
        assert!((grid_l2_norm(&f) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sectoral_harmonic_shape() {
        // √2 L_{2,2}(θ) cos 2φ with L_{2,2} = (1/4) sqrt(15/(2π)) sin²θ
        let grid = SphereGrid::gauss_legendre(5, 7).unwrap();
        let mut c = CoefficientField::sphere(2);
        c.set(2, 2, Component::Cos, 1.0).unwrap();
        let f = synthesize(&c, &grid).unwrap();
        for i in 0..5 {
            for j in 0..7 {
                let th = grid.theta()[i];
                let ph = grid.phi()[j];
                let expect = SQRT_2
                    * 0.25
                    * (15.0 / (2.0 * PI)).sqrt()
                    * th.sin().powi(2)
                    * (2.0 * ph).cos();
                assert!((f.get(i, j) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn parseval_random_band_8() {
        let c = random_field(8, 11);
        let grid = SphereGrid::gauss_legendre(32, 32).unwrap();
        let f = synthesize(&c, &grid).unwrap();
        let quad = grid_l2_norm(&f).powi(2);
        let coef: f64 = c.values().iter().map(|v| v * v).sum();
        assert!((quad - coef).abs() < 1e-10);
    }

    #[test]
    fn degree_window_adds_up() {
        let c = random_field(10, 3);
        let grid = Arc::new(SphereGrid::for_band(10));
        let s = Synthesizer::new(grid, 10);
        let full = s.synthesize(&c).unwrap();
        let lo = s.synthesize_degrees(&c, 0, 4).unwrap();
        let hi = s.synthesize_degrees(&c, 5, 10).unwrap();
        for k in 0..full.values().len() {
            assert!((full.values()[k] - lo.values()[k] - hi.values()[k]).abs() < 1e-12);
        }
        let empty = s.synthesize_degrees(&c, 11, 10).unwrap();
        assert_eq!(grid_max_abs(&empty), 0.0);
    }

    #[test]
    fn norms_of_trivial_fields() {
        let grid = Arc::new(SphereGrid::gauss_legendre(6, 6).unwrap());
        let zero = GridField::zeros(grid.clone());
        assert_eq!(grid_l2_norm(&zero), 0.0);
        assert_eq!(grid_max_abs(&zero), 0.0);
        let c = -2.5;
        let f = GridField::new(grid.clone(), vec![c; 36]).unwrap();
        assert!((grid_l2_norm(&f) - c.abs() * (4.0 * PI).sqrt()).abs() < 1e-12);
        assert_eq!(grid_max_abs(&f), 2.5);
    }

    #[test]
    fn rejects_higher_dimensions() {
        let f = CoefficientField::zeros(2, 4).unwrap();
        let grid = SphereGrid::for_band(2);
        assert!(matches!(
            synthesize(&f, &grid),
            Err(Error::UnsupportedDimension(4))
        ));
    }
}
