use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes in descending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor grid on `S^2`: Gauss–Legendre in `cos θ`, uniform in `φ`.
///
/// With `n_theta ≥ κ+1` and `n_phi ≥ 2κ+1` the quadrature integrates products
/// of band-`κ` fields exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    theta: Vec<f64>,
    phi: Vec<f64>,
    /// Gauss–Legendre weight per colatitude, already multiplied by `2π/n_phi`.
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn gauss_legendre(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Config(format!(
                "grid needs at least one point per axis, got {n_theta}x{n_phi}"
            )));
        }
        let (nodes, gl_weights) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        Ok(Self {
            theta: nodes.iter().map(|x| x.clamp(-1.0, 1.0).acos()).collect(),
            phi: (0..n_phi).map(|j| j as f64 * dphi).collect(),
            weights: gl_weights.iter().map(|w| w * dphi).collect(),
        })
    }

    /// The smallest grid that is exact for squared band-`band` fields.
    pub fn for_band(band: usize) -> Self {
        Self::gauss_legendre(band + 1, 2 * band + 2).expect("non-empty grid")
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Quadrature weight of every point in row `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.n_phi() as f64
    }
}

/// Point values of a field on a [`SphereGrid`], row-major over `(θ_i, φ_j)`.
#[derive(Clone, Debug)]
pub struct GridField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        let expect = grid.n_theta() * grid.n_phi();
        if values.len() != expect {
            return Err(Error::DimensionMismatch(format!(
                "grid has {expect} points, got {} values",
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let n = grid.n_theta() * grid.n_phi();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_phi() + j]
    }

    /// CSV `theta,phi,value`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "theta,phi,value")?;
        let n_phi = self.grid.n_phi();
        for (i, theta) in self.grid.theta().iter().enumerate() {
            for (j, phi) in self.grid.phi().iter().enumerate() {
                writeln!(
                    out,
                    "{theta:.16e},{phi:.16e},{:.16e}",
                    self.values[i * n_phi + j]
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 65] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // ∫ x^k = 2/(k+1) for even k, exact up to degree 2n−1
            for k in (0..2 * n).step_by(2) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - 2.0 / (k as f64 + 1.0)).abs() < 1e-13, "n={n} k={k}");
            }
            assert!(x.windows(2).all(|p| p[0] > p[1]));
        }
    }

    #[test]
    fn total_surface_measure() {
        for (nt, np) in [(1, 1), (17, 34), (129, 258), (400, 3)] {
            let g = SphereGrid::gauss_legendre(nt, np).unwrap();
            assert!((g.total_weight() / (4.0 * PI) - 1.0).abs() < 1e-12);
        }
        assert!(SphereGrid::gauss_legendre(0, 4).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = Arc::new(SphereGrid::gauss_legendre(2, 3).unwrap());
        let f = GridField::new(g.clone(), (0..6).map(|v| v as f64).collect()).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "theta,phi,value");
        assert_eq!(lines.len(), 7);
        let last: Vec<f64> = lines[6].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(last[2], 5.0);
        assert_eq!(last[1], g.phi()[2]);
        assert!(GridField::new(g, vec![0.0; 5]).is_err());
    }
}
