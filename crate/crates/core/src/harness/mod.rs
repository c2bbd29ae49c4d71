//! Monte Carlo and closed-form estimates of the band-limit truncation error.
//!
//! Every sample simulates one path at the reference band `κ_ref`. The
//! approximation at band `κ` is the projection of that same path, which is
//! exactly the path the solver produces at band `κ` since modes evolve
//! independently. The error at `κ` is therefore the tail `κ < l ≤ κ_ref` of
//! the reference path, measured either by Parseval on the coefficients or on
//! a sphere grid.
//!
//! Samples are independent and run on a worker pool; sample `i` always uses
//! random stream `i`, and all sums are formed in sample order, so results do
//! not depend on the number of threads.

mod analytic;
mod table;

pub use analytic::{analytic_second_moment, second_moment_by_degree};
pub use table::{fit_rate, ErrorRow, ErrorTable, Part, RateFit};

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{grid_l2_norm, grid_max_abs, SphereGrid, Synthesizer};
use crate::schrodinger::simulate_path_schrodinger;
use crate::spectrum::{CoefficientField, InitialData, PowerSpectrum};
use crate::trajectory::PathSpec;
use crate::wave::simulate_path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    Wave,
    Schrodinger,
}

impl Equation {
    pub fn parts(self) -> [Part; 2] {
        match self {
            Equation::Wave => [Part::Position, Part::Velocity],
            Equation::Schrodinger => [Part::Real, Part::Imaginary],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Equation::Wave => "wave",
            Equation::Schrodinger => "schrodinger",
        }
    }
}

/// How the tail of a sample is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    /// `L²` norm from the coefficients (Parseval).
    L2Coefficients,
    /// Maximum of the synthesized tail over the grid points.
    MaxGrid,
    /// Quadrature `L²` norm of the synthesized tail.
    L2Grid,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::L2Coefficients => "l2-coefficients",
            ErrorKind::MaxGrid => "max-grid",
            ErrorKind::L2Grid => "l2-grid",
        }
    }

    fn needs_grid(self) -> bool {
        self != ErrorKind::L2Coefficients
    }
}

/// Test functional `φ` of the weak error `|E φ(u) − E φ(u^κ)|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunctional {
    /// `‖u‖²_{L²}`
    SquaredNorm,
    /// `exp(−‖u‖²_{L²})`
    ExpNegSquaredNorm,
}

impl TestFunctional {
    pub fn name(self) -> &'static str {
        match self {
            TestFunctional::SquaredNorm => "squared-norm",
            TestFunctional::ExpNegSquaredNorm => "exp-neg-squared-norm",
        }
    }

    /// `φ` as a function of the squared norm.
    pub fn eval(self, norm_squared: f64) -> f64 {
        match self {
            TestFunctional::SquaredNorm => norm_squared,
            TestFunctional::ExpNegSquaredNorm => (-norm_squared).exp(),
        }
    }
}

/// One convergence study: equation, noise, data, time horizon, band limits
/// and Monte Carlo size.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSetup {
    pub equation: Equation,
    pub dim: usize,
    pub spectrum: PowerSpectrum,
    pub initial: InitialData,
    pub t_final: f64,
    pub steps: usize,
    /// Band limits to evaluate, strictly increasing, none above `kappa_ref`.
    pub kappas: Vec<usize>,
    pub kappa_ref: usize,
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the pool default.
    pub threads: usize,
}

impl ExperimentSetup {
    pub fn validate(&self) -> Result<()> {
        if self.kappas.is_empty() {
            return Err(Error::Config("at least one band limit is required".into()));
        }
        if self.kappas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "band limits must be strictly increasing".into(),
            ));
        }
        let max = *self.kappas.last().expect("non-empty");
        if max > self.kappa_ref {
            return Err(Error::Config(format!(
                "band limit {max} exceeds the reference band {}",
                self.kappa_ref
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.equation == Equation::Schrodinger && self.dim != 3 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        self.path_spec(0).validate()
    }

    pub fn path_spec(&self, sample: u64) -> PathSpec {
        PathSpec {
            spectrum: self.spectrum,
            band: self.kappa_ref,
            dim: self.dim,
            t_final: self.t_final,
            steps: self.steps,
            stride: self.steps.max(1),
            seed: self.seed,
            sample,
            initial: self.initial.clone(),
        }
    }

    /// Both fields of sample `sample` at the final time, at band `kappa_ref`.
    pub fn final_fields(&self, sample: u64) -> Result<(CoefficientField, CoefficientField)> {
        let spec = self.path_spec(sample);
        match self.equation {
            Equation::Wave => {
                let s = simulate_path(&spec, |_, _| {})?;
                Ok((s.position, s.velocity))
            }
            Equation::Schrodinger => {
                let s = simulate_path_schrodinger(&spec, |_, _| {})?;
                Ok((s.real, s.imag))
            }
        }
    }

    /// Strong rates `−r` predicted for the two parts, from the noise
    /// regularity and whichever initial data are present. `None` when
    /// nothing drives the error. Rates never go below zero: a non-convergent
    /// part reports slope 0.
    pub fn reference_slopes(&self) -> [Option<f64>; 2] {
        let d = self.dim as f64;
        let a = self.spectrum.alpha();
        let noise = !self.spectrum.is_zero();
        let (beta, gamma) = match &self.initial {
            InitialData::RandomSobolev { beta, gamma } => (*beta, *gamma),
            _ => (None, None),
        };
        let combine = |terms: Vec<Option<f64>>| {
            terms
                .into_iter()
                .flatten()
                .reduce(f64::min)
                .map(|r| if r > 0.0 { -r } else { 0.0 })
        };
        match self.equation {
            Equation::Wave => [
                combine(vec![
                    noise.then_some((a + 3.0 - d) / 2.0),
                    beta,
                    gamma.map(|g| g + 1.0),
                ]),
                combine(vec![
                    noise.then_some((a + 1.0 - d) / 2.0),
                    beta.map(|b| b - 1.0),
                    gamma,
                ]),
            ],
            Equation::Schrodinger => {
                let r = combine(vec![noise.then_some(a / 2.0 - 1.0), beta, gamma]);
                [r, r]
            }
        }
    }

    fn metadata(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("equation", self.equation.name().into());
        put("d", self.dim.to_string());
        put("alpha", self.spectrum.alpha().to_string());
        put("scale", self.spectrum.scale().to_string());
        put("ell0", self.spectrum.ell0().to_string());
        put("a0", self.spectrum.a0().to_string());
        let initial = match &self.initial {
            InitialData::Zero => "zero".to_string(),
            InitialData::RandomSobolev { beta, gamma } => {
                let show = |x: &Option<f64>| x.map_or("none".to_string(), |v| v.to_string());
                format!("random-sobolev(beta={},gamma={})", show(beta), show(gamma))
            }
            InitialData::Fixed { .. } => "file".to_string(),
        };
        put("initial", initial);
        put("t-final", self.t_final.to_string());
        put("steps", self.steps.to_string());
        put("kappa-ref", self.kappa_ref.to_string());
        put("samples", self.samples.to_string());
        put("seed", self.seed.to_string());
        m
    }

    fn finish_tables(&self, mut tables: Vec<ErrorTable>, factor: f64) -> Vec<ErrorTable> {
        let refs = self.reference_slopes();
        for t in &mut tables {
            let mut meta = self.metadata();
            meta.append(&mut t.metadata);
            t.metadata = meta;
            let idx = usize::from(matches!(t.part, Part::Velocity | Part::Imaginary));
            if let Some(r) = refs[idx] {
                t.metadata
                    .insert("reference-slope".into(), (factor * r).to_string());
            }
            t.fit_excluding(self.kappa_ref);
        }
        tables
    }
}

/// Runs `f(i)` for `i in 0..n` on `threads` workers and returns the results
/// in index order.
fn run_samples<T, F>(threads: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| (0..n as u64).into_par_iter().map(&f).collect())
}

/// Tail errors of one field at every band in `kappas`, for every kind.
/// Output layout: `[kind][kappa]`.
fn tail_errors(
    field: &CoefficientField,
    kappas: &[usize],
    kinds: &[ErrorKind],
    synth: Option<&Synthesizer>,
) -> Result<Vec<Vec<f64>>> {
    let band = field.band();
    let mut grid_tails: Vec<Option<(f64, f64)>> = vec![None; kappas.len()];
    if kinds.iter().any(|k| k.needs_grid()) {
        let synth = synth.ok_or_else(|| Error::Config("grid errors need a grid".into()))?;
        // tail(κ_i) = Σ_{j ≥ i} block(κ_j, κ_{j+1}], accumulated from the top
        let mut acc: Option<Vec<f64>> = None;
        for i in (0..kappas.len()).rev() {
            let hi = kappas.get(i + 1).copied().unwrap_or(band);
            let block = synth.synthesize_degrees(field, kappas[i] + 1, hi)?;
            let sum = match acc.take() {
                None => block,
                Some(prev) => {
                    let values = block
                        .values()
                        .iter()
                        .zip(&prev)
                        .map(|(a, b)| a + b)
                        .collect();
                    crate::GridField::new(synth.grid().clone(), values)?
                }
            };
            grid_tails[i] = Some((grid_l2_norm(&sum), grid_max_abs(&sum)));
            acc = Some(sum.values().to_vec());
        }
    }
    Ok(kinds
        .iter()
        .map(|kind| {
            kappas
                .iter()
                .enumerate()
                .map(|(i, &k)| match kind {
                    ErrorKind::L2Coefficients => field.tail_norm_squared(k).sqrt(),
                    ErrorKind::L2Grid => grid_tails[i].expect("grid tails").0,
                    ErrorKind::MaxGrid => grid_tails[i].expect("grid tails").1,
                })
                .collect()
        })
        .collect())
}

fn make_synthesizer(
    setup: &ExperimentSetup,
    kinds: &[ErrorKind],
    grid: Option<&SphereGrid>,
) -> Result<Option<Synthesizer>> {
    if !kinds.iter().any(|k| k.needs_grid()) {
        return Ok(None);
    }
    if setup.dim != 3 {
        return Err(Error::UnsupportedDimension(setup.dim));
    }
    let grid = grid
        .cloned()
        .unwrap_or_else(|| SphereGrid::for_band(setup.kappa_ref));
    Ok(Some(Synthesizer::new(Arc::new(grid), setup.kappa_ref)))
}

fn grid_label(synth: &Option<Synthesizer>) -> Option<String> {
    synth
        .as_ref()
        .map(|s| format!("{}x{}", s.grid().n_theta(), s.grid().n_phi()))
}

/// Root-mean-square truncation error over `setup.samples` coupled samples,
/// for every requested error kind and both parts of the state. Tables come
/// out kind-major: `[kind0/part0, kind0/part1, kind1/part0, …]`.
pub fn strong_error_experiment(
    setup: &ExperimentSetup,
    kinds: &[ErrorKind],
    grid: Option<&SphereGrid>,
) -> Result<Vec<ErrorTable>> {
    setup.validate()?;
    let synth = make_synthesizer(setup, kinds, grid)?;
    let per_sample = run_samples(setup.threads, setup.samples, |i| {
        let (a, b) = setup.final_fields(i)?;
        Ok([
            tail_errors(&a, &setup.kappas, kinds, synth.as_ref())?,
            tail_errors(&b, &setup.kappas, kinds, synth.as_ref())?,
        ])
    })?;
    let n = setup.samples as f64;
    let mut tables = Vec::new();
    for (ki, kind) in kinds.iter().enumerate() {
        for (pi, part) in setup.equation.parts().into_iter().enumerate() {
            let rows = setup
                .kappas
                .iter()
                .enumerate()
                .map(|(ci, &kappa)| {
                    let (mut s2, mut s4) = (0.0, 0.0);
                    for sample in &per_sample {
                        let e2 = sample[pi][ki][ci].powi(2);
                        s2 += e2;
                        s4 += e2 * e2;
                    }
                    let m2 = s2 / n;
                    let error = m2.sqrt();
                    // delta method: se(√m) = se(m) / (2√m)
                    let stderr = if setup.samples > 1 && error > 0.0 {
                        let var = ((s4 - n * m2 * m2) / (n - 1.0)).max(0.0);
                        (var / n).sqrt() / (2.0 * error)
                    } else {
                        0.0
                    };
                    ErrorRow {
                        kappa,
                        error,
                        stderr,
                    }
                })
                .collect();
            let mut t = ErrorTable::new(part, format!("strong/{}", kind.name()), rows);
            if let Some(g) = grid_label(&synth) {
                t.metadata.insert("grid".into(), g);
            }
            tables.push(t);
        }
    }
    Ok(setup.finish_tables(tables, 1.0))
}

/// Truncation error of a single path (sample 0 under `setup.seed`).
pub fn pathwise_error_experiment(
    setup: &ExperimentSetup,
    kinds: &[ErrorKind],
    grid: Option<&SphereGrid>,
) -> Result<Vec<ErrorTable>> {
    let single = ExperimentSetup {
        samples: 1,
        ..setup.clone()
    };
    let mut tables = strong_error_experiment(&single, kinds, grid)?;
    for t in &mut tables {
        t.statistic = t.statistic.replacen("strong/", "pathwise/", 1);
    }
    Ok(tables)
}

/// `|E φ(u^{κ_ref}) − E φ(u^κ)|` from coupled samples, for every functional
/// and both parts. Tables come out functional-major.
pub fn weak_error_experiment(
    setup: &ExperimentSetup,
    functionals: &[TestFunctional],
) -> Result<Vec<ErrorTable>> {
    setup.validate()?;
    let per_sample = run_samples(setup.threads, setup.samples, |i| {
        let (a, b) = setup.final_fields(i)?;
        let diffs = |f: &CoefficientField| -> Vec<Vec<f64>> {
            let total = f.norm_squared();
            functionals
                .iter()
                .map(|phi| {
                    setup
                        .kappas
                        .iter()
                        .map(|&k| phi.eval(total) - phi.eval(total - f.tail_norm_squared(k)))
                        .collect()
                })
                .collect()
        };
        Ok([diffs(&a), diffs(&b)])
    })?;
    let n = setup.samples as f64;
    let mut tables = Vec::new();
    for (fi, phi) in functionals.iter().enumerate() {
        for (pi, part) in setup.equation.parts().into_iter().enumerate() {
            let rows = setup
                .kappas
                .iter()
                .enumerate()
                .map(|(ci, &kappa)| {
                    let (mut s, mut s2) = (0.0, 0.0);
                    for sample in &per_sample {
                        let d = sample[pi][fi][ci];
                        s += d;
                        s2 += d * d;
                    }
                    let mean = s / n;
                    let stderr = if setup.samples > 1 {
                        (((s2 - n * mean * mean) / (n - 1.0)).max(0.0) / n).sqrt()
                    } else {
                        0.0
                    };
                    ErrorRow {
                        kappa,
                        error: mean.abs(),
                        stderr,
                    }
                })
                .collect();
            tables.push(ErrorTable::new(part, format!("weak/{}", phi.name()), rows));
        }
    }
    Ok(setup.finish_tables(tables, 2.0))
}

/// Weak error of the squared norm from the closed-form second moments:
/// `E‖u^{κ_ref}‖² − E‖u^κ‖²`, with no sampling noise.
pub fn analytic_weak_experiment(setup: &ExperimentSetup) -> Result<Vec<ErrorTable>> {
    setup.validate()?;
    let per = second_moment_by_degree(
        setup.equation,
        &setup.spectrum,
        setup.kappa_ref,
        setup.t_final,
        setup.dim,
        &setup.initial,
    )?;
    let mut tables = Vec::new();
    for (pi, part) in setup.equation.parts().into_iter().enumerate() {
        let rows = setup
            .kappas
            .iter()
            .map(|&kappa| {
                // sum the tail from the top so small terms are not lost
                let error: f64 = per[kappa + 1..]
                    .iter()
                    .rev()
                    .map(|p| if pi == 0 { p.0 } else { p.1 })
                    .sum();
                ErrorRow {
                    kappa,
                    error,
                    stderr: 0.0,
                }
            })
            .collect();
        tables.push(ErrorTable::new(part, "weak/analytic-squared-norm", rows));
    }
    let mut out = setup.finish_tables(tables, 2.0);
    for t in &mut out {
        t.metadata.insert("samples".into(), "analytic".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{sample_conv_increments, ConvFactorTable, Kernel};
    use crate::rng::stream;
    use crate::wave::{step_with_increments, WaveState};

    fn setup(alpha: f64, samples: usize) -> ExperimentSetup {
        ExperimentSetup {
            equation: Equation::Wave,
            dim: 3,
            spectrum: PowerSpectrum::new(alpha, 1.0).unwrap(),
            initial: InitialData::Zero,
            t_final: 1.0,
            steps: 1,
            kappas: vec![2, 4, 8, 16],
            kappa_ref: 16,
            samples,
            seed: 5,
            threads: 2,
        }
    }

    #[test]
    fn validation() {
        let mut s = setup(3.0, 2);
        assert!(s.validate().is_ok());
        s.kappas = vec![4, 2];
        assert!(s.validate().is_err());
        s.kappas = vec![2, 32];
        assert!(s.validate().is_err());
        s.kappas = vec![];
        assert!(s.validate().is_err());
        let mut s = setup(3.0, 0);
        assert!(s.validate().is_err());
        s.samples = 1;
        s.equation = Equation::Schrodinger;
        s.dim = 4;
        assert!(s.validate().is_err());
    }

    #[test]
    fn self_comparison_is_exact() {
        let s = setup(3.0, 3);
        let t = strong_error_experiment(&s, &[ErrorKind::L2Coefficients, ErrorKind::MaxGrid], None)
            .unwrap();
        assert_eq!(t.len(), 4);
        for table in &t {
            assert_eq!(table.error_at(16), Some(0.0));
            assert!(table.rows.iter().all(|r| r.error >= 0.0));
        }
        let w = weak_error_experiment(&s, &[TestFunctional::SquaredNorm]).unwrap();
        assert_eq!(w[0].error_at(16), Some(0.0));
        let p = pathwise_error_experiment(&s, &[ErrorKind::L2Coefficients], None).unwrap();
        assert_eq!(p[0].error_at(16), Some(0.0));
        assert!(p[0].statistic.starts_with("pathwise/"));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut s = setup(3.0, 9);
        s.threads = 1;
        let a = strong_error_experiment(&s, &[ErrorKind::L2Coefficients], None).unwrap();
        s.threads = 4;
        let b = strong_error_experiment(&s, &[ErrorKind::L2Coefficients], None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_and_coefficient_norms_agree() {
        let s = setup(3.0, 4);
        let t = strong_error_experiment(
            &s,
            &[
                ErrorKind::L2Coefficients,
                ErrorKind::L2Grid,
                ErrorKind::MaxGrid,
            ],
            None,
        )
        .unwrap();
        for part in 0..2 {
            let (c, g, m) = (&t[part], &t[2 + part], &t[4 + part]);
            for ((rc, rg), rm) in c.rows.iter().zip(&g.rows).zip(&m.rows) {
                assert!((rc.error - rg.error).abs() <= 1e-8 * rc.error.max(1e-300));
                // ‖f‖_∞ ≥ ‖f‖_{L²} / √(4π); the RMS over samples keeps the bound
                assert!(rm.error >= rg.error / (4.0 * std::f64::consts::PI).sqrt() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn max_grid_bound_per_sample() {
        let s = setup(3.0, 1);
        let (a, _) = s.final_fields(0).unwrap();
        let synth = Synthesizer::new(Arc::new(SphereGrid::for_band(16)), 16);
        let e = tail_errors(
            &a,
            &[2, 4, 8],
            &[ErrorKind::L2Grid, ErrorKind::MaxGrid],
            Some(&synth),
        )
        .unwrap();
        for (max, l2) in e[1].iter().zip(&e[0]) {
            assert!(*max >= l2 / (4.0 * std::f64::consts::PI).sqrt());
        }
    }

    #[test]
    fn coupling_projection_commutes_with_stepping() {
        // stepping the band-κ projection with projected increments equals
        // projecting the band-κ_ref step
        let band_ref = 20;
        let kappa = 7;
        let ps = PowerSpectrum::new(3.0, 1.0).unwrap();
        let h = 0.3;
        let table = ConvFactorTable::new(Kernel::Wave, h, band_ref, 3).unwrap();
        let mut rng = stream(1, 0);
        let mut fine = WaveState::zeros(band_ref, 3).unwrap();
        let mut coarse = WaveState::zeros(kappa, 3).unwrap();
        for _ in 0..6 {
            let (w1, w2) = sample_conv_increments(&ps, &table, &mut rng).unwrap();
            fine = step_with_increments(&fine, h, &w1, &w2).unwrap();
            coarse = step_with_increments(&coarse, h, &w1.with_band(kappa), &w2.with_band(kappa))
                .unwrap();
            let proj = fine.position.with_band(kappa);
            for (a, b) in proj.values().iter().zip(coarse.position.values()) {
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
            let proj = fine.velocity.with_band(kappa);
            for (a, b) in proj.values().iter().zip(coarse.velocity.values()) {
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn mc_weak_agrees_with_analytic() {
        let mut s = setup(3.0, 4000);
        s.threads = 0;
        let mc = weak_error_experiment(&s, &[TestFunctional::SquaredNorm]).unwrap();
        let an = analytic_weak_experiment(&s).unwrap();
        for part in 0..2 {
            for (m, a) in mc[part].rows.iter().zip(&an[part].rows) {
                assert!(
                    (m.error - a.error).abs() <= 3.0 * m.stderr + 1e-15,
                    "{m:?} vs {a:?}"
                );
            }
        }
    }

    #[test]
    fn mc_second_moment_matches_closed_form() {
        let s = ExperimentSetup {
            kappa_ref: 16,
            samples: 10_000,
            threads: 0,
            ..setup(3.0, 1)
        };
        let (p, v) =
            analytic_second_moment(Equation::Wave, &s.spectrum, 16, 1.0, 3, &InitialData::Zero)
                .unwrap();
        let samples = run_samples(0, s.samples, |i| {
            let (a, b) = s.final_fields(i)?;
            Ok((a.norm_squared(), b.norm_squared()))
        })
        .unwrap();
        let n = samples.len() as f64;
        for (which, expect) in [(0, p), (1, v)] {
            let xs: Vec<f64> = samples
                .iter()
                .map(|x| if which == 0 { x.0 } else { x.1 })
                .collect();
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(
                (mean - expect).abs() < 3.0 * (var / n).sqrt(),
                "{mean} vs {expect}"
            );
        }
    }

    #[test]
    fn reference_slopes() {
        let s = setup(3.0, 1);
        assert_eq!(s.reference_slopes(), [Some(-1.5), Some(-0.5)]);
        let s = ExperimentSetup {
            spectrum: PowerSpectrum::new(10.0, 1.0).unwrap(),
            initial: InitialData::RandomSobolev {
                beta: Some(2.0),
                gamma: None,
            },
            ..setup(3.0, 1)
        };
        assert_eq!(s.reference_slopes(), [Some(-2.0), Some(-1.0)]);
        let s = setup(1.0, 1);
        assert_eq!(s.reference_slopes(), [Some(-0.5), Some(0.0)]);
        let s = ExperimentSetup {
            dim: 4,
            ..setup(4.0, 1)
        };
        assert_eq!(s.reference_slopes(), [Some(-1.5), Some(-0.5)]);
        let s = ExperimentSetup {
            equation: Equation::Schrodinger,
            ..setup(4.0, 1)
        };
        assert_eq!(s.reference_slopes(), [Some(-1.0), Some(-1.0)]);
        let s = ExperimentSetup {
            spectrum: PowerSpectrum::zero(),
            ..setup(4.0, 1)
        };
        assert_eq!(s.reference_slopes(), [None, None]);
    }

    #[test]
    fn functionals() {
        assert_eq!(TestFunctional::SquaredNorm.eval(2.5), 2.5);
        assert!((TestFunctional::ExpNegSquaredNorm.eval(1.0) - (-1f64).exp()).abs() < 1e-16);
        assert!(TestFunctional::ExpNegSquaredNorm.eval(1e6).is_finite());
    }
}
