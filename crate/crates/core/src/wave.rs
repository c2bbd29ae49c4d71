//! Exact-in-distribution time stepping for the stochastic wave equation
//! `∂_tt u = Δ u + Ẇ` on `S^{d−1}`.
//!
//! Each mode `(u₁, u₂)` of degree `l` obeys a harmonic oscillator with
//! frequency `√λ_l`, `λ_l = l(l+d−2)`. One step of length `h` applies the
//! propagator
//!
//! ```text
//! [ cos(√λ h)        sin(√λ h)/√λ ]
//! [ −√λ sin(√λ h)    cos(√λ h)    ]
//! ```
//!
//! (the limit `[[1, h], [0, 1]]` at `l = 0`) and adds a pair drawn from the
//! exact covariance of the stochastic convolution. The time step therefore
//! introduces no error; only the band limit does.

use rand::Rng;

use crate::error::{Error, Result};
use crate::harmonics::eigenvalue_magnitude;
use crate::noise::{sample_conv_increments_into, ConvFactorTable, Kernel};
use crate::rng::stream;
use crate::spectrum::{CoefficientField, PowerSpectrum};
use crate::trajectory::{PathSpec, Snapshot, Trajectory};

/// Position and velocity coefficients at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub position: CoefficientField,
    pub velocity: CoefficientField,
    pub time: f64,
}

impl WaveState {
    pub fn zeros(band: usize, dim: usize) -> Result<Self> {
        let z = CoefficientField::zeros(band, dim)?;
        Ok(Self {
            position: z.clone(),
            velocity: z,
            time: 0.0,
        })
    }

    pub fn band(&self) -> usize {
        self.position.band()
    }

    pub fn dim(&self) -> usize {
        self.position.dim()
    }
}

/// Initial state from position and velocity data, projected onto band `band`.
pub fn init_state(
    position: &CoefficientField,
    velocity: &CoefficientField,
    band: usize,
    dim: usize,
) -> Result<WaveState> {
    for f in [position, velocity] {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "initial data on d={} for a solver on d={dim}",
                f.dim()
            )));
        }
    }
    Ok(WaveState {
        position: position.with_band(band),
        velocity: velocity.with_band(band),
        time: 0.0,
    })
}

/// Per-degree 2×2 propagator over a fixed step.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    step: f64,
    dim: usize,
    /// `(cos(√λ h), sin(√λ h)/√λ, −λ·sin(√λ h)/√λ)` per degree.
    rows: Vec<(f64, f64, f64)>,
}

impl Propagator {
    pub fn new(band: usize, dim: usize, step: f64) -> Self {
        let rows = (0..=band)
            .map(|ell| {
                if ell == 0 {
                    return (1.0, step, 0.0);
                }
                let lam = eigenvalue_magnitude(ell, dim) as f64;
                let root = lam.sqrt();
                let (s, c) = (root * step).sin_cos();
                (c, s / root, -root * s)
            })
            .collect();
        Self { step, dim, rows }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn band(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `[[a, b], [c, d]]` for degree `ell`.
    pub fn matrix(&self, ell: usize) -> [[f64; 2]; 2] {
        let (c, r1, q) = self.rows[ell];
        [[c, r1], [q, c]]
    }

    pub fn determinant(&self, ell: usize) -> f64 {
        let m = self.matrix(ell);
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Applies the propagator in place.
    pub fn apply(&self, state: &mut WaveState) {
        for (ell, &(c, r1, q)) in self.rows.iter().enumerate() {
            let u1 = state.position.degree_mut(ell);
            // split borrow: positions and velocities live in different fields
            let u2 = state.velocity.degree_mut(ell);
            for (a, b) in u1.iter_mut().zip(u2.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = c * x + r1 * y;
                *b = q * x + c * y;
            }
        }
        state.time += self.step;
    }
}

fn check_factors(state: &WaveState, h: f64, factors: &ConvFactorTable) -> Result<()> {
    factors.check(Kernel::Wave, h, state.band(), state.dim())
}

/// Deterministic propagation over `h` followed by the given increments.
pub fn step_with_increments(
    state: &WaveState,
    h: f64,
    w1: &CoefficientField,
    w2: &CoefficientField,
) -> Result<WaveState> {
    state.position.check_same_shape(w1)?;
    state.position.check_same_shape(w2)?;
    let mut next = state.clone();
    Propagator::new(state.band(), state.dim(), h).apply(&mut next);
    next.position.add_assign(w1)?;
    next.velocity.add_assign(w2)?;
    Ok(next)
}

/// Reusable stepping workspace for one path.
pub struct WaveStepper<'a> {
    spectrum: &'a PowerSpectrum,
    factors: &'a ConvFactorTable,
    propagator: Propagator,
    w1: CoefficientField,
    w2: CoefficientField,
}

impl<'a> WaveStepper<'a> {
    pub fn new(spectrum: &'a PowerSpectrum, factors: &'a ConvFactorTable) -> Result<Self> {
        if factors.kernel() != Kernel::Wave {
            return Err(Error::FactorMismatch(
                "wave stepping needs a wave factor table".into(),
            ));
        }
        let w1 = CoefficientField::zeros(factors.band(), factors.dim())?;
        Ok(Self {
            spectrum,
            factors,
            propagator: Propagator::new(factors.band(), factors.dim(), factors.step()),
            w2: w1.clone(),
            w1,
        })
    }

    /// One exact step of the table's step size.
    pub fn advance<R: Rng + ?Sized>(&mut self, state: &mut WaveState, rng: &mut R) -> Result<()> {
        check_factors(state, self.factors.step(), self.factors)?;
        sample_conv_increments_into(self.spectrum, self.factors, rng, &mut self.w1, &mut self.w2)?;
        self.propagator.apply(state);
        state.position.add_assign(&self.w1)?;
        state.velocity.add_assign(&self.w2)?;
        Ok(())
    }
}

/// One step of size `h`.
pub fn step<R: Rng + ?Sized>(
    state: &WaveState,
    h: f64,
    spectrum: &PowerSpectrum,
    rng: &mut R,
    factors: &ConvFactorTable,
) -> Result<WaveState> {
    check_factors(state, h, factors)?;
    let mut next = state.clone();
    WaveStepper::new(spectrum, factors)?.advance(&mut next, rng)?;
    Ok(next)
}

/// Runs the path described by `spec`: draws the initial data, then the
/// increments of each step, all from stream `spec.sample` under `spec.seed`.
/// `visit` sees every state on the time grid, including the initial one.
pub fn simulate_path<F>(spec: &PathSpec, mut visit: F) -> Result<WaveState>
where
    F: FnMut(usize, &WaveState),
{
    spec.validate()?;
    let mut rng = stream(spec.seed, spec.sample);
    let (v1, v2) = spec.initial.draw(spec.band, spec.dim, &mut rng)?;
    let mut state = WaveState {
        position: v1,
        velocity: v2,
        time: 0.0,
    };
    let factors = ConvFactorTable::new(Kernel::Wave, spec.step(), spec.band, spec.dim)?;
    let mut stepper = WaveStepper::new(&spec.spectrum, &factors)?;
    visit(0, &state);
    for j in 1..=spec.steps {
        stepper.advance(&mut state, &mut rng)?;
        state.time = spec.time(j);
        visit(j, &state);
    }
    Ok(state)
}

/// Strided trajectory of the path described by `spec`.
pub fn run_path(spec: &PathSpec) -> Result<Trajectory> {
    let mut traj = Trajectory::new(["u1", "u2"], spec.band, spec.dim, spec.seed);
    simulate_path(spec, |j, s| {
        if spec.keeps(j) {
            traj.snapshots.push(Snapshot {
                t: s.time,
                first: s.position.clone(),
                second: s.velocity.clone(),
            });
        }
    })?;
    Ok(traj)
}

/// `E_l = Σ_m (λ_l u₁² + u₂²)` per degree, conserved without noise.
pub fn mode_energy(state: &WaveState) -> Vec<f64> {
    let p = state.position.degree_norms_squared();
    let v = state.velocity.degree_norms_squared();
    p.iter()
        .zip(&v)
        .zip(state.position.eigenvalues())
        .map(|((p, v), lam)| lam * p + v)
        .collect()
}
