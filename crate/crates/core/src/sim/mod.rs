//! Event-level Monte Carlo of the interferometer, from pair emission to a
//! time-tag stream, plus the rate-level fringe-scan generators.
//!
//! Interference is semiclassical: the precomputed visibility modulates the
//! probability that a central-peak event (both photons unshifted or both
//! shifted) is registered as a coincidence, so the event stream reproduces
//! the ideal coincidence probability in expectation without propagating
//! amplitudes per pair.
//!
//! Random numbers come from ChaCha8 keyed by the master seed. Time segment
//! `k` of a tag simulation draws from stream `k + 1`; bin `k` of a fringe scan
//! draws from stream `SCAN_STREAM_BASE + k`. Streams are independent, so
//! segments could be generated in any order and merged.

mod models;
mod rates;
mod scan;
mod tags;
mod timetags;

pub use models::{
    ArmLosses, DetectorModel, DriftModel, Experiment, ShifterModel, Source, VisibilityPenalties,
};
pub use rates::{expected_rates, ExpectedRates};
pub use scan::{
    adaptive_phase_schedule, simulate_drift_scan, simulate_pzt_scan, FringeScan, ScanPoint,
    ScanSource, COARSE_STEP, FINE_STEP,
};
pub use tags::{Channel, Tag, TimeTagStream};
pub use timetags::{simulate_timetags, SEGMENT_SECONDS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const SCAN_STREAM_BASE: u64 = 1 << 32;

pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson draw that accepts a zero mean.
pub(crate) fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    use rand_distr::{Distribution, Poisson};
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}
