use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::sim::{Channel, TimeTagStream};
use crate::{Error, Result};

/// Coincidence counts against `t_S - t_I`. Bin `k` is centered on
/// `(k - half_bins) * bin_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    pub bin_width: f64,
    pub window: f64,
    pub counts: Vec<u64>,
}

impl CoincidenceHistogram {
    pub fn half_bins(&self) -> usize {
        self.counts.len() / 2
    }

    pub fn center(&self, k: usize) -> f64 {
        (k as f64 - self.half_bins() as f64) * self.bin_width
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.counts.len()).map(|k| self.center(k))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Only bins lying wholly inside `[-window, window]` are kept.
    pub fn empty(bin_width: f64, window: f64) -> Self {
        let half = (window / bin_width - 0.5).floor().max(0.0) as usize;
        Self {
            bin_width,
            window,
            counts: vec![0; 2 * half + 1],
        }
    }
}

/// Pairs every signal tag with the nearest unused idler tag within `window`
/// (signals taken in time order, ties to the earlier idler) and histograms
/// the pair delays `t_S - t_I`. Delays are integer ticks, so a `bin_width`
/// that is not a multiple of the tick gives bins holding unequal numbers of
/// tick values.
pub fn build_histogram(stream: &TimeTagStream, window: f64, bin_width: f64) -> Result<CoincidenceHistogram> {
    crate::error::positive("window", window)?;
    crate::error::positive("bin_width", bin_width)?;
    let tick = stream.tick();
    if bin_width < tick * (1.0 - 1e-9) {
        return Err(Error::Invalid(alloc::format!(
            "bin width {bin_width:e} s is finer than the {tick:e} s tagger tick"
        )));
    }
    let mut hist = CoincidenceHistogram::empty(bin_width, window);
    let half = hist.half_bins() as i64;
    let reach = (window / tick).floor() as u64;
    let signals = stream.channel_ticks(Channel::Signal);
    let idlers = stream.channel_ticks(Channel::Idler);
    let mut used = vec![false; idlers.len()];
    let mut lo = 0usize;
    for s in signals {
        while lo < idlers.len() && idlers[lo] + reach < s {
            lo += 1;
        }
        let mut best: Option<(u64, usize)> = None;
        let mut j = lo;
        while j < idlers.len() && idlers[j] <= s + reach {
            if !used[j] {
                let d = idlers[j].abs_diff(s);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, j));
                }
            }
            j += 1;
        }
        let Some((_, j)) = best else { continue };
        let dt = (s as i64 - idlers[j] as i64) as f64 * tick;
        if dt.abs() > window {
            continue;
        }
        used[j] = true;
        let k = (dt / bin_width).round() as i64 + half;
        if (0..hist.counts.len() as i64).contains(&k) {
            hist.counts[k as usize] += 1;
        }
    }
    Ok(hist)
}
