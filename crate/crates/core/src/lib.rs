//! Simulation and analysis kernels for conjugate-Franson interferometry (CFI)
//! of time-energy entangled photon pairs.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. File formats,
//! configuration and the command-line front-end live in `cfi-tools`.
//!
//! Layout:
//!
//! - [`grid`]: uniform frequency/time grids, amplitude containers and the
//!   normalized Fourier transforms linking joint spectral and joint temporal
//!   amplitudes.
//! - [`states`]: Gaussian, Gaussian-ridge and flat-top biphoton constructors.
//! - [`interferometer`]: coincidence probability and fringe visibility in the
//!   time and frequency domains.
//! - [`sim`]: event-level Monte Carlo of the interferometer, detectors and
//!   time tagger.
//! - [`analysis`]: coincidence histograms, peak finding, frequency mapping
//!   and fringe fitting.
//! - [`retrieval`]: spectral phase retrieval from intensity pairs.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
mod error;
pub mod fft;
pub mod grid;
pub mod interferometer;
pub mod retrieval;
pub mod sim;
pub mod states;
pub mod units;

pub use error::{Error, Result};
pub use grid::{
    Amplitude1D, Amplitude2D, FrequencyGrid, Intensity1D, Intensity2D, JointSpectralAmplitude2D,
    JointTemporalAmplitude2D, SpectralAmplitude1D, TemporalAmplitude1D, TimeGrid,
};
