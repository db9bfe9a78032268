use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::histogram::CoincidenceHistogram;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Centroid delay (s).
    pub center: f64,
    /// Background-subtracted counts.
    pub area: f64,
    /// Background-subtracted rms width (s).
    pub rms_width: f64,
}

/// Up to three peaks sorted by delay.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// The peak closest to zero delay.
    pub fn central(&self) -> Option<&Peak> {
        self.peaks
            .iter()
            .min_by(|a, b| a.center.abs().total_cmp(&b.center.abs()))
    }

    /// Half the distance between the outermost peaks, if there are three.
    pub fn mean_side_separation(&self) -> Option<f64> {
        (self.peaks.len() == 3).then(|| (self.peaks[2].center - self.peaks[0].center) / 2.0)
    }
}

fn median(values: &[u64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] + v[m]) as f64 / 2.0
    }
}

/// Finds up to three local maxima above `5 * max(median, 1)` that are at
/// least `expected_sep / 2` apart, then refines each with a centroid over
/// +-3 bins and integrates it over +-`expected_sep / 2` on top of a linear
/// background drawn between the window edges.
pub fn find_peaks(hist: &CoincidenceHistogram, expected_sep: f64) -> Result<PeakSet> {
    crate::error::positive("expected_sep", expected_sep)?;
    if expected_sep <= 3.0 * hist.bin_width {
        return Err(Error::Invalid(alloc::format!(
            "expected peak separation {expected_sep:e} s must exceed three bins ({:e} s)",
            3.0 * hist.bin_width
        )));
    }
    let c = &hist.counts;
    let n = c.len();
    let threshold = 5.0 * median(c).max(1.0);
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&k| {
            let v = c[k];
            (v as f64) > threshold && (k == 0 || v > c[k - 1]) && (k + 1 == n || v >= c[k + 1])
        })
        .collect();
    candidates.sort_by(|&a, &b| c[b].cmp(&c[a]).then(a.cmp(&b)));
    let min_gap = expected_sep / 2.0 / hist.bin_width;
    let mut chosen: Vec<usize> = Vec::new();
    for k in candidates {
        if chosen.len() == 3 {
            break;
        }
        if chosen.iter().all(|&j| (j as f64 - k as f64).abs() >= min_gap) {
            chosen.push(k);
        }
    }
    chosen.sort_unstable();

    let half_window = (expected_sep / 2.0 / hist.bin_width).floor() as usize;
    let peaks = chosen
        .into_iter()
        .map(|k| {
            let lo = k.saturating_sub(3);
            let hi = (k + 3).min(n - 1);
            let (mut w, mut wx) = (0.0, 0.0);
            for j in lo..=hi {
                w += c[j] as f64;
                wx += c[j] as f64 * hist.center(j);
            }
            let center = wx / w;

            let lo = k.saturating_sub(half_window);
            let hi = (k + half_window).min(n - 1);
            let (b0, b1) = (c[lo] as f64, c[hi] as f64);
            let span = (hi - lo).max(1) as f64;
            let (mut area, mut m1, mut m2) = (0.0, 0.0, 0.0);
            for j in lo..=hi {
                let bg = b0 + (b1 - b0) * (j - lo) as f64 / span;
                let net = (c[j] as f64 - bg).max(0.0);
                let x = hist.center(j) - center;
                area += c[j] as f64 - bg;
                m1 += net * x;
                m2 += net * x * x;
            }
            let net_total: f64 = (lo..=hi)
                .map(|j| (c[j] as f64 - (b0 + (b1 - b0) * (j - lo) as f64 / span)).max(0.0))
                .sum();
            let rms_width = if net_total > 0.0 {
                let mean = m1 / net_total;
                (m2 / net_total - mean * mean).max(0.0).sqrt()
            } else {
                0.0
            };
            Peak {
                center,
                area: area.max(0.0),
                rms_width,
            }
        })
        .collect();
    Ok(PeakSet { peaks })
}
