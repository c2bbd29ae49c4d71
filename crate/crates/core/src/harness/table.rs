use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half of the state a table measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Position,
    Velocity,
    Real,
    Imaginary,
}

impl Part {
    pub fn name(self) -> &'static str {
        match self {
            Part::Position => "position",
            Part::Velocity => "velocity",
            Part::Real => "real",
            Part::Imaginary => "imaginary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub kappa: usize,
    pub error: f64,
    pub stderr: f64,
}

/// Least-squares line through `(log κ, log error)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// `log e_i − (intercept + slope · log κ_i)` per fitted point.
    pub residuals: Vec<f64>,
    pub kappa_min: usize,
    pub kappa_max: usize,
}

/// Fits `log e = a + b log κ` and returns the slope `b`, intercept `a` and
/// residuals. Needs at least three points with `κ > 0` and `e > 0`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(k, e) in points {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Fit(format!("non-positive band {k}")));
        }
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::Fit(format!("non-positive error {e} at band {k}")));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all bands coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let kappa_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) as usize;
    let kappa_max = points.iter().map(|p| p.0).fold(0.0, f64::max) as usize;
    Ok(RateFit {
        slope,
        intercept,
        residuals,
        kappa_min,
        kappa_max,
    })
}

/// Error statistic per band limit for one part of the state, with its fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub part: Part,
    /// E.g. `strong/l2-coefficients`, `weak/squared-norm`.
    pub statistic: String,
    pub rows: Vec<ErrorRow>,
    pub fit: Option<RateFit>,
    pub metadata: BTreeMap<String, String>,
}

impl ErrorTable {
    pub fn new(part: Part, statistic: impl Into<String>, rows: Vec<ErrorRow>) -> Self {
        Self {
            part,
            statistic: statistic.into(),
            rows,
            fit: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.slope)
    }

    pub fn error_at(&self, kappa: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.kappa == kappa).map(|r| r.error)
    }

    /// Fits every row except the smallest band and any band equal to
    /// `kappa_ref`. Leaves `fit` empty when fewer than three usable points
    /// remain or an error is zero.
    pub fn fit_excluding(&mut self, kappa_ref: usize) {
        let smallest = self.rows.iter().map(|r| r.kappa).min();
        let points: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| Some(r.kappa) != smallest && r.kappa != kappa_ref)
            .map(|r| (r.kappa as f64, r.error))
            .collect();
        self.fit = fit_rate(&points).ok();
        match &self.fit {
            Some(f) => {
                self.metadata.insert(
                    "fit-range".into(),
                    format!("{}..{}", f.kappa_min, f.kappa_max),
                );
                self.metadata.insert("slope".into(), format!("{}", f.slope));
            }
            None => {
                self.metadata.insert("fit-range".into(), "none".into());
            }
        }
    }

    /// `# key=value` metadata lines, then `kappa,error,stderr`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# part={}", self.part.name())?;
        writeln!(out, "# statistic={}", self.statistic)?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "kappa,error,stderr")?;
        for r in &self.rows {
            writeln!(out, "{},{:.16e},{:.16e}", r.kappa, r.error, r.stderr)?;
        }
        Ok(())
    }
}
