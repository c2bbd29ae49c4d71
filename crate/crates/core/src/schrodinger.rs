//! Exact-in-distribution time stepping for the free stochastic Schrödinger
//! equation on `S^2`, written for the real and imaginary parts.
//!
//! Per mode the deterministic flow is the rotation
//! `(u_R, u_I) ↦ (cos x · u_R + sin x · u_I, −sin x · u_R + cos x · u_I)` with
//! `x = √λ h`. The noise enters the imaginary equation as `−dW`, so the
//! stochastic convolution over one step is `−(Ŵ_R, Ŵ_I)` with
//! `Ŵ_R = ∫ sin(√λ(h−s)) da(s)` and `Ŵ_I = ∫ cos(√λ(h−s)) da(s)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::harmonics::eigenvalue_magnitude;
use crate::noise::{sample_conv_increments_into, ConvFactorTable, Kernel};
use crate::rng::stream;
use crate::spectrum::{CoefficientField, PowerSpectrum};
use crate::trajectory::{PathSpec, Snapshot, Trajectory};

#[derive(Clone, Debug, PartialEq)]
pub struct SchrodingerState {
    pub real: CoefficientField,
    pub imag: CoefficientField,
    pub time: f64,
}

impl SchrodingerState {
    pub fn zeros(band: usize) -> Self {
        let z = CoefficientField::sphere(band);
        Self {
            real: z.clone(),
            imag: z,
            time: 0.0,
        }
    }

    pub fn band(&self) -> usize {
        self.real.band()
    }

    /// `‖u_R‖² + ‖u_I‖²`, conserved without noise.
    pub fn mass(&self) -> f64 {
        self.real.norm_squared() + self.imag.norm_squared()
    }
}

/// Rotates every mode by `x = √λ_l h`.
fn rotate(state: &mut SchrodingerState, h: f64) {
    for ell in 0..=state.band() {
        let x = (eigenvalue_magnitude(ell, 3) as f64).sqrt() * h;
        let (s, c) = x.sin_cos();
        let re = state.real.degree_mut(ell);
        let im = state.imag.degree_mut(ell);
        for (a, b) in re.iter_mut().zip(im.iter_mut()) {
            let (r, i) = (*a, *b);
            *a = c * r + s * i;
            *b = -s * r + c * i;
        }
    }
    state.time += h;
}

pub struct SchrodingerStepper<'a> {
    spectrum: &'a PowerSpectrum,
    factors: &'a ConvFactorTable,
    wr: CoefficientField,
    wi: CoefficientField,
}

impl<'a> SchrodingerStepper<'a> {
    pub fn new(spectrum: &'a PowerSpectrum, factors: &'a ConvFactorTable) -> Result<Self> {
        if factors.kernel() != Kernel::Schrodinger {
            return Err(Error::FactorMismatch(
                "Schrödinger stepping needs a Schrödinger factor table".into(),
            ));
        }
        let wr = CoefficientField::sphere(factors.band());
        Ok(Self {
            spectrum,
            factors,
            wi: wr.clone(),
            wr,
        })
    }

    pub fn advance<R: Rng + ?Sized>(
        &mut self,
        state: &mut SchrodingerState,
        rng: &mut R,
    ) -> Result<()> {
        self.factors.check(
            Kernel::Schrodinger,
            self.factors.step(),
            state.band(),
            state.real.dim(),
        )?;
        sample_conv_increments_into(self.spectrum, self.factors, rng, &mut self.wr, &mut self.wi)?;
        rotate(state, self.factors.step());
        for (u, w) in state.real.values_mut().iter_mut().zip(self.wr.values()) {
            *u -= w;
        }
        for (u, w) in state.imag.values_mut().iter_mut().zip(self.wi.values()) {
            *u -= w;
        }
        Ok(())
    }
}

/// One step of size `h`.
pub fn schrodinger_step<R: Rng + ?Sized>(
    state: &SchrodingerState,
    h: f64,
    spectrum: &PowerSpectrum,
    rng: &mut R,
    factors: &ConvFactorTable,
) -> Result<SchrodingerState> {
    factors.check(Kernel::Schrodinger, h, state.band(), state.real.dim())?;
    let mut next = state.clone();
    SchrodingerStepper::new(spectrum, factors)?.advance(&mut next, rng)?;
    Ok(next)
}

/// Runs the path described by `spec` (which must have `dim = 3`), visiting
/// every state on the time grid.
pub fn simulate_path_schrodinger<F>(spec: &PathSpec, mut visit: F) -> Result<SchrodingerState>
where
    F: FnMut(usize, &SchrodingerState),
{
    spec.validate()?;
    if spec.dim != 3 {
        return Err(Error::UnsupportedDimension(spec.dim));
    }
    let mut rng = stream(spec.seed, spec.sample);
    let (real, imag) = spec.initial.draw(spec.band, 3, &mut rng)?;
    let mut state = SchrodingerState {
        real,
        imag,
        time: 0.0,
    };
    let factors = ConvFactorTable::new(Kernel::Schrodinger, spec.step(), spec.band, 3)?;
    let mut stepper = SchrodingerStepper::new(&spec.spectrum, &factors)?;
    visit(0, &state);
    for j in 1..=spec.steps {
        stepper.advance(&mut state, &mut rng)?;
        state.time = spec.time(j);
        visit(j, &state);
    }
    Ok(state)
}

/// Strided trajectory with blocks `R` and `I`.
pub fn run_path_schrodinger(spec: &PathSpec) -> Result<Trajectory> {
    let mut traj = Trajectory::new(["R", "I"], spec.band, 3, spec.seed);
    simulate_path_schrodinger(spec, |j, s| {
        if spec.keeps(j) {
            traj.snapshots.push(Snapshot {
                t: s.time,
                first: s.real.clone(),
                second: s.imag.clone(),
            });
        }
    })?;
    Ok(traj)
}
