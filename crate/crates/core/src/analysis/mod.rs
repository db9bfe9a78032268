//! From time tags and fringe scans back to physical quantities.

mod fit;
mod histogram;
mod peaks;

pub use fit::{fit_fringe, visibility_minmax, visibility_minmax_scan, FringeFit, Method, VisibilityEstimate};
pub use histogram::{build_histogram, CoincidenceHistogram};
pub use peaks::{find_peaks, Peak, PeakSet};

use crate::{Error, Result};

/// A dispersive time-to-frequency mapping result (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyMapping {
    pub detuning: f64,
    /// `combined_jitter / |beta2|`.
    pub resolution: f64,
}

/// Maps an arrival-time difference `dt` through dispersion `beta2` to a
/// frequency detuning `dt / beta2`. `combined_jitter` is the rms timing
/// uncertainty of `dt` (the two detectors' jitters in quadrature).
pub fn map_time_to_frequency(dt: f64, beta2: f64, combined_jitter: f64) -> Result<FrequencyMapping> {
    if beta2 == 0.0 || !beta2.is_finite() {
        return Err(Error::Invalid(alloc::format!("beta2 must be non-zero, got {beta2}")));
    }
    crate::error::non_negative("combined_jitter", combined_jitter)?;
    Ok(FrequencyMapping {
        detuning: dt / beta2,
        resolution: combined_jitter / beta2.abs(),
    })
}
