//! Spectral Galerkin solvers for the stochastic wave equation on the unit
//! sphere `S^{d-1}` and the free stochastic Schrödinger equation on `S^2`,
//! driven by isotropic Q-Wiener noise.
//!
//! Every state is a [`CoefficientField`] in the real orthonormal
//! spherical-harmonic basis. Each mode evolves independently, so a time step
//! is an exact rotation plus a correlated Gaussian increment drawn from the
//! closed-form 2×2 covariance of the stochastic convolution. The band limit
//! `κ` is the only discretization parameter; the [`harness`] module measures
//! how the truncation error decays with `κ`.
//!
//! Module map:
//! - [`harmonics`]: Legendre functions, real spherical harmonics, Gauss–Legendre grids, synthesis.
//! - [`spectrum`]: angular power spectra, coefficient fields, Sobolev norms.
//! - [`noise`]: random fields, Q-Wiener increments, convolution covariances and factors.
//! - [`wave`] / [`schrodinger`]: exact-in-distribution time stepping.
//! - [`harness`]: strong, pathwise and weak error experiments with log-log fits.
//! - [`config`] / [`commands`]: experiment configuration, presets and file-writing commands.

pub mod commands;
pub mod config;
mod error;
pub mod harmonics;
pub mod harness;
pub mod noise;
pub mod rng;
pub mod schrodinger;
pub mod spectrum;
pub mod trajectory;
pub mod wave;

pub use error::{Error, Result};
pub use harmonics::{GridField, SphereGrid};
pub use noise::{ConvCovariance, ConvFactorTable, Kernel};
pub use spectrum::{CoefficientField, PowerSpectrum};
