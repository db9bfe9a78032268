//! Biphoton state constructors.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::positive;
use crate::grid::{
    Amplitude1D, Amplitude2D, Axis, Carrier, FrequencyGrid, JointSpectralAmplitude2D,
    JointTemporalAmplitude2D, SpectralAmplitude1D, TemporalAmplitude1D, TimeGrid,
};
use crate::{Error, Result};

/// Largest admissible probability mass outside the grid for the Gaussian states.
pub const TAIL_MASS_LIMIT: f64 = 1e-6;

/// Parameters of the pulsed Gaussian biphoton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBiphotonParams {
    /// rms coherence time (s), set by the pump linewidth.
    pub sigma_coh: f64,
    /// rms correlation time (s), set by the phase-matching bandwidth.
    pub sigma_cor: f64,
    pub omega_s0: f64,
    pub omega_i0: f64,
}

impl GaussianBiphotonParams {
    pub fn new(sigma_coh: f64, sigma_cor: f64, omega_s0: f64, omega_i0: f64) -> Result<Self> {
        positive("sigma_coh", sigma_coh)?;
        positive("sigma_cor", sigma_cor)?;
        Ok(Self {
            sigma_coh,
            sigma_cor,
            omega_s0,
            omega_i0,
        })
    }

    /// `sigma_coh >= sigma_cor`. States outside this regime are still built;
    /// callers decide whether to warn.
    pub fn is_entangled_regime(&self) -> bool {
        self.sigma_coh >= self.sigma_cor
    }

    pub fn carrier(&self) -> Carrier {
        Carrier {
            omega_s0: self.omega_s0,
            omega_i0: self.omega_i0,
        }
    }
}

/// Two-sided tail mass of a zero-mean Gaussian with standard deviation `sd`
/// beyond `|x| > half_width`.
fn gaussian_tail(sd: f64, half_width: f64) -> f64 {
    libm::erfc(half_width / (sd * core::f64::consts::SQRT_2))
}

/// Distance from zero to the nearest edge of a grid.
fn reach<G: Axis>(grid: &G) -> f64 {
    (-grid.first()).min(grid.last()).max(0.0)
}

/// With `u = x_S - x_I` and `v = x_S + x_I`, the region `|u|, |v| <= w` lies
/// inside the square grid of reach `w`, and `u`, `v` are independent for the
/// Gaussian states, so the tails of the two marginals at `w` bound the mass
/// that falls off the grid.
fn check_rotated_tails(
    reach: f64,
    sd_diff: f64,
    sd_sum: f64,
    names: (&'static str, &'static str),
) -> Result<()> {
    for (sd, direction) in [(sd_diff, names.0), (sd_sum, names.1)] {
        let tail_mass = gaussian_tail(sd, reach);
        if tail_mass > TAIL_MASS_LIMIT {
            return Err(Error::GridTooNarrow {
                direction,
                tail_mass,
            });
        }
    }
    Ok(())
}

/// `Psi(w_S, w_I) ~ exp(-(w_S - w_I)^2 s_coh^2) exp(-(w_S + w_I)^2 s_cor^2 / 4)`,
/// renormalized on the grid.
pub fn gaussian_jsa(
    params: &GaussianBiphotonParams,
    grid_s: &FrequencyGrid,
    grid_i: &FrequencyGrid,
) -> Result<JointSpectralAmplitude2D> {
    // |Psi|^2 has sd(w_S - w_I) = 1/(2 s_coh) and sd(w_S + w_I) = 1/s_cor.
    let w = reach(grid_s).min(reach(grid_i));
    check_rotated_tails(
        w,
        1.0 / (2.0 * params.sigma_coh),
        1.0 / params.sigma_cor,
        ("omega_s - omega_i", "omega_s + omega_i"),
    )?;
    let (sc, sr) = (params.sigma_coh, params.sigma_cor);
    let norm = (PI / (2.0 * sc * sr)).sqrt();
    let raw = Amplitude2D::from_fn(*grid_s, *grid_i, |ws, wi| {
        let u = ws - wi;
        let v = ws + wi;
        Complex64::new((-u * u * sc * sc - v * v * sr * sr / 4.0).exp() / norm, 0.0)
    });
    let (jsa, _) = Amplitude2D::normalized(*grid_s, *grid_i, raw.values().to_vec())?;
    Ok(jsa)
}

/// Closed-form joint temporal amplitude of the Gaussian biphoton, including
/// the carrier phase, renormalized on the grid.
pub fn gaussian_jta(
    params: &GaussianBiphotonParams,
    grid_s: &TimeGrid,
    grid_i: &TimeGrid,
) -> Result<JointTemporalAmplitude2D> {
    // |psi|^2 ~ exp(-(t_S+t_I)^2 / 8 s_coh^2) exp(-(t_S-t_I)^2 / 2 s_cor^2).
    let w = reach(grid_s).min(reach(grid_i));
    check_rotated_tails(
        w,
        params.sigma_cor,
        2.0 * params.sigma_coh,
        ("t_s - t_i", "t_s + t_i"),
    )?;
    let raw = Amplitude2D::from_fn(*grid_s, *grid_i, |ts, ti| {
        gaussian_jta_closed_form(params, ts, ti)
    });
    let (jta, _) = Amplitude2D::normalized(*grid_s, *grid_i, raw.values().to_vec())?;
    Ok(jta)
}

/// Unnormalized-on-grid closed form (normalized in the continuum).
pub fn gaussian_jta_closed_form(params: &GaussianBiphotonParams, ts: f64, ti: f64) -> Complex64 {
    let (sc, sr) = (params.sigma_coh, params.sigma_cor);
    let plus = ts + ti;
    let minus = ts - ti;
    let envelope = (-plus * plus / (16.0 * sc * sc) - minus * minus / (4.0 * sr * sr)).exp()
        / (2.0 * PI * sc * sr).sqrt();
    Complex64::from_polar(envelope, -(params.omega_s0 * ts + params.omega_i0 * ti))
}

/// cw limit of the Gaussian state: the ridge amplitude `Psi(w) ~ exp(-w^2 s_cor^2)`,
/// whose temporal intensity is a Gaussian in `t_S - t_I` with rms `s_cor`.
pub fn gaussian_cw_jsa(sigma_cor: f64, grid: &FrequencyGrid) -> Result<SpectralAmplitude1D> {
    positive("sigma_cor", sigma_cor)?;
    let tail_mass = gaussian_tail(1.0 / (2.0 * sigma_cor), reach(grid));
    if tail_mass > TAIL_MASS_LIMIT {
        return Err(Error::GridTooNarrow {
            direction: "omega",
            tail_mass,
        });
    }
    let raw = Amplitude1D::from_fn(*grid, |w| Complex64::new((-w * w * sigma_cor * sigma_cor).exp(), 0.0));
    Ok(Amplitude1D::normalized(*grid, raw.into_values())?.0)
}

/// Closed-form temporal amplitude matching [`gaussian_cw_jsa`].
pub fn gaussian_cw_jta(sigma_cor: f64, grid: &TimeGrid) -> Result<TemporalAmplitude1D> {
    positive("sigma_cor", sigma_cor)?;
    let tail_mass = gaussian_tail(sigma_cor, reach(grid));
    if tail_mass > TAIL_MASS_LIMIT {
        return Err(Error::GridTooNarrow {
            direction: "t_s - t_i",
            tail_mass,
        });
    }
    let raw = Amplitude1D::from_fn(*grid, |t| {
        Complex64::new((-t * t / (4.0 * sigma_cor * sigma_cor)).exp(), 0.0)
    });
    Ok(Amplitude1D::normalized(*grid, raw.into_values())?.0)
}

/// Flat-top spectrum of half-width `omega_max` with a phase step `phi` applied
/// to `omega_1 < |w| <= omega_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatTopPhaseParams {
    pub omega_max: f64,
    pub omega_1: f64,
    pub phi: f64,
}

/// Phases are reduced to `[0, 2 pi)` and rounded to multiples of `2 pi / 2^40`
/// so that `phi` and `phi + 2 pi` give bit-identical samples.
const PHASE_QUANTA: f64 = (1u64 << 40) as f64;

fn canonical_phase(phi: f64) -> f64 {
    let x = phi / (2.0 * PI);
    let turns = x - x.floor();
    let q = (turns * PHASE_QUANTA).round();
    if q >= PHASE_QUANTA {
        0.0
    } else {
        2.0 * PI * q / PHASE_QUANTA
    }
}

impl FlatTopPhaseParams {
    pub fn new(omega_max: f64, omega_1: f64, phi: f64) -> Result<Self> {
        positive("omega_max", omega_max)?;
        positive("omega_1", omega_1)?;
        if omega_1 >= omega_max {
            return Err(Error::OutOfRange {
                name: "omega_1",
                value: omega_1,
                range: "(0, omega_max)",
            });
        }
        if !phi.is_finite() {
            return Err(Error::Invalid(alloc::format!("phi = {phi} is not finite")));
        }
        Ok(Self {
            omega_max,
            omega_1,
            phi,
        })
    }

    /// The demonstration state: 320 GHz wide, phase band 80 to 160 GHz.
    pub fn demonstration(phi: f64) -> Self {
        Self {
            omega_max: 2.0 * PI * 160e9,
            omega_1: 2.0 * PI * 80e9,
            phi,
        }
    }

    /// Closed-form visibility of this state for a shift `delta_omega` with
    /// `delta_omega <= omega_max - omega_1` and `2 delta_omega <= omega_1`.
    pub fn visibility_closed_form(&self, delta_omega: f64) -> f64 {
        (2.0 * self.omega_max - 3.0 * delta_omega + 2.0 * delta_omega * self.phi.cos())
            / (2.0 * self.omega_max)
    }
}

/// Samples the flat-top state. A grid point exactly on an edge belongs to the
/// inner region (`|w| <= omega_1` is closed) and the outer support is closed
/// at `omega_max`; "exactly" means within `1e-9` of a grid spacing.
///
/// `delta_omega` is the largest shift the state will be overlapped with; the
/// grid must extend at least that far beyond `omega_max` on both sides.
pub fn flat_top_jsa(
    params: &FlatTopPhaseParams,
    grid: &FrequencyGrid,
    delta_omega: f64,
) -> Result<SpectralAmplitude1D> {
    let guard = delta_omega.abs();
    if grid.first() > -(params.omega_max + guard) || grid.last() < params.omega_max + guard {
        return Err(Error::GuardBand(alloc::format!(
            "grid [{:e}, {:e}] rad/s must cover +-(omega_max + delta_omega) = +-{:e} rad/s",
            grid.first(),
            grid.last(),
            params.omega_max + guard
        )));
    }
    let eps = 1e-9 * grid.d_omega();
    let step = Complex64::from_polar(1.0, canonical_phase(params.phi));
    let values: Vec<Complex64> = grid
        .points()
        .map(|w| {
            let a = w.abs();
            if a <= params.omega_1 + eps {
                Complex64::new(1.0, 0.0)
            } else if a <= params.omega_max + eps {
                step
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Amplitude1D::normalized(*grid, values)?.0)
}

/// Checks that tabulated sample positions are uniform and returns
/// `(n, spacing, center)` with the center at index `n / 2`.
pub fn uniform_axis(points: &[f64]) -> Result<(usize, f64, f64)> {
    let n = points.len();
    if n < 8 {
        return Err(Error::GridTooSmall(n));
    }
    let spacing = (points[n - 1] - points[0]) / (n - 1) as f64;
    if !(spacing > 0.0) {
        return Err(Error::NonUniform { row: 1 });
    }
    for (row, pair) in points.windows(2).enumerate() {
        if ((pair[1] - pair[0]) - spacing).abs() > 1e-6 * spacing {
            return Err(Error::NonUniform { row: row + 1 });
        }
    }
    Ok((n, spacing, points[n / 2]))
}

/// Builds a normalized 1-D state from tabulated samples in grid order. Returns
/// the state and its norm before rescaling.
pub fn tabulated_1d(omegas: &[f64], values: Vec<Complex64>) -> Result<(SpectralAmplitude1D, f64)> {
    let (n, d, center) = uniform_axis(omegas)?;
    let grid = FrequencyGrid::new(n, d, center)?;
    Amplitude1D::normalized(grid, values)
}

/// Builds a normalized 2-D state from rows `(w_S, w_I, value)` with `w_S`
/// slowest, as written by the CSV writer.
pub fn tabulated_2d(rows: &[(f64, f64, Complex64)]) -> Result<(JointSpectralAmplitude2D, f64)> {
    let n_total = rows.len();
    let n_i = rows.iter().take_while(|r| r.0 == rows[0].0).count();
    if n_i == 0 || n_total % n_i != 0 {
        return Err(Error::Invalid(alloc::format!(
            "{n_total} rows do not form a rectangular grid"
        )));
    }
    let n_s = n_total / n_i;
    let omega_i: Vec<f64> = rows[..n_i].iter().map(|r| r.1).collect();
    let omega_s: Vec<f64> = (0..n_s).map(|s| rows[s * n_i].0).collect();
    for (k, r) in rows.iter().enumerate() {
        if r.0 != omega_s[k / n_i] || r.1 != omega_i[k % n_i] {
            return Err(Error::NonUniform { row: k + 1 });
        }
    }
    let (ns, ds, cs) = uniform_axis(&omega_s)?;
    let (ni, di, ci) = uniform_axis(&omega_i)?;
    let grid_s = FrequencyGrid::new(ns, ds, cs)?;
    let grid_i = FrequencyGrid::new(ni, di, ci)?;
    Amplitude2D::normalized(grid_s, grid_i, rows.iter().map(|r| r.2).collect())
}
