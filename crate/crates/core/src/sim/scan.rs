use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_distr::{Distribution, Normal};

use super::models::Experiment;
use super::rates::expected_rates;
use super::{poisson, substream, SCAN_STREAM_BASE};
use crate::error::positive;
use crate::Result;

/// Phase step used near a fringe extremum (rad).
pub const FINE_STEP: f64 = 0.15;
/// Phase step used elsewhere (rad).
pub const COARSE_STEP: f64 = 0.52;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanSource {
    /// Phase sum advanced by thermal drift.
    Drift,
    /// Phase stepped with the fiber stretcher.
    Pzt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub phi_t: f64,
    pub coincidences: u64,
    /// Integration time (s).
    pub integration: f64,
}

/// Central-peak coincidence counts against phase sum.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub points: Vec<ScanPoint>,
    pub source: ScanSource,
}

impl FringeScan {
    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.points.iter().map(|p| p.coincidences)
    }

    pub fn max_count(&self) -> Option<u64> {
        self.counts().max()
    }

    pub fn min_count(&self) -> Option<u64> {
        self.counts().min()
    }
}

fn bin_noise(experiment: &Experiment, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let rms = experiment.penalties.phase_noise_rms;
    if rms > 0.0 {
        Normal::new(0.0, rms).expect("finite noise").sample(rng)
    } else {
        0.0
    }
}

/// Counts of the central peak recorded while the phase sum drifts. Bin `k`
/// is centered at `(k + 1/2) * bin_seconds`; its count is Poisson around the
/// expected central rate (accidentals in `window` included) at the drifted
/// phase. The recorded phase excludes the optional phase blur.
pub fn simulate_drift_scan(
    experiment: &Experiment,
    window: f64,
    bin_seconds: f64,
    n_bins: usize,
    seed: u64,
) -> Result<FringeScan> {
    positive("bin_seconds", bin_seconds)?;
    crate::error::non_negative("window", window)?;
    let points = (0..n_bins)
        .map(|k| {
            let mut rng = substream(seed, SCAN_STREAM_BASE + k as u64);
            let phi = experiment.phase_at((k as f64 + 0.5) * bin_seconds);
            let actual = phi + bin_noise(experiment, &mut rng);
            let rate = expected_rates(experiment, actual).central_with_accidentals(window);
            ScanPoint {
                phi_t: phi,
                coincidences: poisson(&mut rng, rate * bin_seconds),
                integration: bin_seconds,
            }
        })
        .collect();
    Ok(FringeScan {
        points,
        source: ScanSource::Drift,
    })
}

/// Next fiber-stretcher step: fine when the count lies within 10 % of the
/// fringe range from either target extremum, coarse otherwise or when no
/// targets are known yet.
pub fn adaptive_phase_schedule(current_count: f64, targets: Option<(f64, f64)>) -> f64 {
    let Some((max, min)) = targets else {
        return COARSE_STEP;
    };
    if !(max > min) {
        return COARSE_STEP;
    }
    let margin = 0.1 * (max - min);
    if current_count >= max - margin || current_count <= min + margin {
        FINE_STEP
    } else {
        COARSE_STEP
    }
}

/// One adaptive fiber-stretcher scan of the signal phase from 0 to 2 pi.
/// Each point integrates `integration` seconds; drift keeps acting during
/// the scan. `targets` are the extremes expected from earlier scans.
/// Returns the scan and the extremes it observed.
pub fn simulate_pzt_scan(
    experiment: &Experiment,
    window: f64,
    integration: f64,
    targets: Option<(f64, f64)>,
    seed: u64,
) -> Result<(FringeScan, (f64, f64))> {
    positive("integration", integration)?;
    let mut points = Vec::new();
    let mut pzt = 0.0;
    let mut clock = 0.0;
    let mut k = 0u64;
    while pzt <= 2.0 * PI {
        let mut rng = substream(seed, SCAN_STREAM_BASE + k);
        let nominal = experiment.cfg.phi_t() + pzt;
        let actual = nominal + experiment.drift.phase_at(clock + integration / 2.0)
            + bin_noise(experiment, &mut rng);
        let rate = expected_rates(experiment, actual).central_with_accidentals(window);
        let count = poisson(&mut rng, rate * integration);
        points.push(ScanPoint {
            phi_t: nominal,
            coincidences: count,
            integration,
        });
        pzt += adaptive_phase_schedule(count as f64, targets);
        clock += integration;
        k += 1;
    }
    let scan = FringeScan {
        points,
        source: ScanSource::Pzt,
    };
    let observed = (
        scan.max_count().unwrap_or(0) as f64,
        scan.min_count().unwrap_or(0) as f64,
    );
    Ok((scan, observed))
}
