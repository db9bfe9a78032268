//! Coincidence probability and fringe visibility of the conjugate-Franson
//! interferometer.
//!
//! The time-domain forms integrate the joint temporal intensity against
//! `cos(dW (t_S - t_I) + phi_T)`; the frequency-domain forms take the overlap
//! of the joint spectral amplitude with a copy of itself shifted by `dW`.
//! Both use midpoint sums on the sample grids.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{non_negative, positive, unit_interval};
use crate::grid::{
    Axis, JointSpectralAmplitude2D, Jti1D, Jti2D, NormL2, SpectralAmplitude1D,
};
use crate::{Error, Result};

/// Largest tolerated deviation of an input intensity's integral from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Spectral mass allowed to fall off the grid when shifting by `dW`.
pub const GUARD_MASS_LIMIT: f64 = 1e-12;

/// Interferometer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfiConfig {
    /// Frequency shift `dW > 0` applied in the shifted arms (rad/s).
    pub delta_omega: f64,
    /// Signal MZI phase difference (rad).
    pub phi_s: f64,
    /// Idler MZI phase difference (rad).
    pub phi_i: f64,
    /// Per-arm measurement efficiency.
    pub eta: f64,
    /// Dispersion in the signal arm (s^2); the idler arm gets `-beta2`.
    pub beta2: f64,
}

impl CfiConfig {
    pub fn new(delta_omega: f64, phi_s: f64, phi_i: f64, eta: f64, beta2: f64) -> Result<Self> {
        non_negative("delta_omega", delta_omega)?;
        unit_interval("eta", eta)?;
        if !(phi_s.is_finite() && phi_i.is_finite() && beta2.is_finite()) {
            return Err(Error::Invalid("phases and beta2 must be finite".into()));
        }
        Ok(Self {
            delta_omega,
            phi_s,
            phi_i,
            eta,
            beta2,
        })
    }

    /// Lossless interferometer with no dispersion, phases zero.
    pub fn ideal(delta_omega: f64) -> Self {
        Self {
            delta_omega,
            phi_s: 0.0,
            phi_i: 0.0,
            eta: 1.0,
            beta2: 0.0,
        }
    }

    /// The interferometer's phase sum `phi_S + phi_I`.
    pub fn phi_t(&self) -> f64 {
        self.phi_s + self.phi_i
    }

    pub fn with_phi_t(mut self, phi_t: f64) -> Self {
        self.phi_s = phi_t;
        self.phi_i = 0.0;
        self
    }
}

fn check_normalized(integral: f64) -> Result<()> {
    if (integral - 1.0).abs() > NORMALIZATION_TOLERANCE {
        Err(Error::NotNormalized(integral))
    } else {
        Ok(())
    }
}

/// `integral JTI(t) cos(dW t + phase) dt` for a normalized 1-D JTI.
pub fn fringe_term_cw(jti: &Jti1D, delta_omega: f64, phase: f64) -> Result<f64> {
    check_normalized(jti.integral())?;
    let grid = jti.grid();
    let sum: f64 = grid
        .points()
        .zip(jti.values())
        .map(|(t, w)| w * (delta_omega * t + phase).cos())
        .sum();
    Ok(sum * grid.d_t())
}

/// `(eta^2 / 8) (1 + integral JTI(t) cos(dW t + phi_T) dt)`.
pub fn cfi_probability_cw(jti: &Jti1D, cfg: &CfiConfig) -> Result<f64> {
    let fringe = fringe_term_cw(jti, cfg.delta_omega, cfg.phi_t())?;
    Ok(probability(cfg.eta, fringe))
}

/// `V = integral JTI(t) cos(dW t) dt`.
pub fn cfi_visibility_cw(jti: &Jti1D, delta_omega: f64) -> Result<f64> {
    fringe_term_cw(jti, delta_omega, 0.0)
}

fn probability(eta: f64, fringe: f64) -> f64 {
    eta * eta / 8.0 * (1.0 + fringe)
}

/// Coincidence probability for a given visibility and phase sum, for a state
/// whose fringe is centered at `phi_T = 0`.
pub fn probability_from_visibility(visibility: f64, phi_t: f64, eta: f64) -> f64 {
    probability(eta, visibility * phi_t.cos())
}

/// Frequency-domain visibility, with the shift snapped to the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyVisibility {
    pub visibility: f64,
    /// Complex overlap `integral Psi*(w) Psi(w + dW) dw`; `visibility` is its real part.
    pub overlap: Complex64,
    /// Shift actually applied, in grid points.
    pub shift_bins: usize,
    pub snapped_delta_omega: f64,
    /// `snapped_delta_omega - delta_omega`.
    pub snap_error: f64,
}

fn snap_shift<G: Axis>(grid: &G, delta_omega: f64) -> Result<(usize, f64)> {
    non_negative("delta_omega", delta_omega)?;
    let bins = (delta_omega / grid.spacing()).round();
    if bins >= grid.len() as f64 {
        return Err(Error::GuardBand(alloc::format!(
            "shift of {bins} bins exceeds the {}-point grid",
            grid.len()
        )));
    }
    Ok((bins as usize, bins * grid.spacing()))
}

/// `Re integral Psi*(w) Psi(w + dW) dw` on the cw ridge.
pub fn cfi_visibility_freq(jsa: &SpectralAmplitude1D, delta_omega: f64) -> Result<FrequencyVisibility> {
    check_normalized(jsa.norm_l2())?;
    let grid = jsa.grid();
    let (m, snapped) = snap_shift(grid, delta_omega)?;
    let v = jsa.values();
    let n = v.len();
    let lost: f64 = v[..m].iter().chain(&v[n - m..]).map(|a| a.norm_sqr()).sum::<f64>() * grid.d_omega();
    if lost > GUARD_MASS_LIMIT {
        return Err(Error::GuardBand(alloc::format!(
            "spectral mass {lost:e} within {m} bins of the grid edge has no shifted partner"
        )));
    }
    let overlap = v[..n - m]
        .iter()
        .zip(&v[m..])
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        * grid.d_omega();
    Ok(FrequencyVisibility {
        visibility: overlap.re,
        overlap,
        shift_bins: m,
        snapped_delta_omega: snapped,
        snap_error: snapped - delta_omega,
    })
}

/// `(eta^2 / 8) (1 + integral JTI(t_S, t_I) cos(dW (t_S - t_I) + phi_T))`.
pub fn cfi_probability_2d(jti: &Jti2D, cfg: &CfiConfig) -> Result<f64> {
    check_normalized(jti.integral())?;
    let (gs, gi) = (jti.grid_s(), jti.grid_i());
    let mut sum = 0.0;
    for (s, ts) in gs.points().enumerate() {
        for (i, ti) in gi.points().enumerate() {
            sum += jti.get(s, i) * (cfg.delta_omega * (ts - ti) + cfg.phi_t()).cos();
        }
    }
    Ok(probability(cfg.eta, sum * gs.d_t() * gi.d_t()))
}

/// Visibility of the pulsed 2-D state, `integral JTI cos(dW (t_S - t_I))`.
pub fn cfi_visibility_2d(jti: &Jti2D, delta_omega: f64) -> Result<f64> {
    let cfg = CfiConfig::ideal(delta_omega);
    Ok(cfi_probability_2d(jti, &cfg)? * 8.0 - 1.0)
}

/// Frequency-domain coincidence probability of the pulsed state,
/// `(eta^2/8)(1 + Re[exp(i phi_T) sum Psi*(w_S, w_I) Psi(w_S + dW, w_I + dW)])`.
/// Both arguments shift by `+dW` because the idler detuning enters the state
/// as `w_I0 - w_I`; the result equals [`cfi_probability_2d`] of the
/// transformed state.
pub fn cfi_probability_freq_2d(jsa: &JointSpectralAmplitude2D, cfg: &CfiConfig) -> Result<f64> {
    check_normalized(jsa.norm_l2())?;
    let (gs, gi) = (jsa.grid_s(), jsa.grid_i());
    let (ms, _) = snap_shift(gs, cfg.delta_omega)?;
    let (mi, _) = snap_shift(gi, cfg.delta_omega)?;
    let (ns, ni) = (gs.len(), gi.len());
    let mut overlap = Complex64::new(0.0, 0.0);
    let mut paired = 0.0;
    for s in 0..ns - ms {
        for i in 0..ni - mi {
            let a = jsa.get(s, i);
            let b = jsa.get(s + ms, i + mi);
            overlap += a.conj() * b;
            paired += a.norm_sqr();
        }
    }
    let cell = gs.d_omega() * gi.d_omega();
    let lost = 1.0 - paired * cell;
    if lost > GUARD_MASS_LIMIT.max(1e-9) {
        return Err(Error::GuardBand(alloc::format!(
            "spectral mass {lost:e} has no shifted partner on the grid"
        )));
    }
    let fringe = (overlap * cell * Complex64::from_polar(1.0, cfg.phi_t())).re;
    Ok(probability(cfg.eta, fringe))
}

/// `V = exp(-dW^2 s_cor^2 / 2)` for the Gaussian biphoton.
pub fn gaussian_visibility_closed_form(sigma_cor: f64, delta_omega: f64) -> Result<f64> {
    positive("sigma_cor", sigma_cor)?;
    let x = delta_omega * sigma_cor;
    Ok((-x * x / 2.0).exp())
}

/// Coincidence probability at each phase sum in `phi_t`.
pub fn sweep_phi_t(jti: &Jti1D, cfg: &CfiConfig, phi_t: &[f64]) -> Result<Vec<(f64, f64)>> {
    phi_t
        .iter()
        .map(|&phi| Ok((phi, cfi_probability_cw(jti, &cfg.with_phi_t(phi))?)))
        .collect()
}

/// `(max - min) / (max + min)` of a set of fringe samples.
pub fn fringe_visibility(samples: &[f64]) -> Option<f64> {
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    (max + min > 0.0).then(|| (max - min) / (max + min))
}
