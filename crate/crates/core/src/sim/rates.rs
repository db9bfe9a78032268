#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::models::Experiment;

/// Expected event rates (per second) at a fixed phase sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedRates {
    /// Coincidences in the central (interfering) peak, excluding accidentals.
    pub central_peak: f64,
    /// Coincidences in each of the two side peaks.
    pub side_peak_each: f64,
    pub singles_s: f64,
    pub singles_i: f64,
    /// Accidental coincidences per second per second of coincidence window,
    /// `singles_s * singles_i`.
    pub accidental_density: f64,
}

impl ExpectedRates {
    /// Central-peak rate including accidentals inside a window of the given width.
    pub fn central_with_accidentals(&self, window: f64) -> f64 {
        self.central_peak + self.accidental_density * window
    }
}

/// Rates implied by the event model of [`super::simulate_timetags`].
///
/// With both arms lossless, each of the four path configurations is taken
/// with probability 1/4; a non-interfering configuration yields a coincidence
/// with probability 1/2 and the interfering pair (both unshifted or both
/// shifted) with probability `(1 + V cos phi_T) / 4`, so that the central peak
/// carries `(eta^2/8)(1 + V cos phi_T)` and each side peak `eta^2/8`. Residual
/// carrier leakage `e` moves events between peaks: a leaked photon in a
/// single-shift configuration lands in the central peak without interfering.
pub fn expected_rates(experiment: &Experiment, phi_t: f64) -> ExpectedRates {
    let (eta_s, eta_i) = experiment.arm_efficiencies();
    let pairs = experiment.pair_rate;
    let both = pairs * eta_s * eta_i;
    let e = experiment.shifter.residual_probability();
    let v = experiment.effective_visibility();
    let coherent = 0.25 * (1.0 + (1.0 - e) * (1.0 - e)) * (1.0 + v * phi_t.cos()) / 4.0;
    // Central without interference: both-shifted with both leaking, or a
    // single shift that leaked. A both-shifted pair with one leak is a side event.
    let leaked_central = (0.25 * e * e + 0.5 * e) * 0.5;
    let side = 0.125 * (1.0 - e * e);
    let singles_s = pairs * eta_s / 2.0 + experiment.detector.dark_rate;
    let singles_i = pairs * eta_i / 2.0 + experiment.detector.dark_rate;
    ExpectedRates {
        central_peak: both * (coherent + leaked_central),
        side_peak_each: both * side,
        singles_s,
        singles_i,
        accidental_density: singles_s * singles_i,
    }
}
