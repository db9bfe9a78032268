use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Signal,
    Idler,
}

impl Channel {
    pub fn code(self) -> u8 {
        match self {
            Channel::Signal => 0,
            Channel::Idler => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Channel::Signal),
            1 => Some(Channel::Idler),
            _ => None,
        }
    }
}

/// One detection: channel and timestamp in tagger ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag {
    pub tick: u64,
    pub channel: Channel,
}

/// Time-ordered detection records of one acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTagStream {
    records: Vec<Tag>,
    tick: f64,
    duration: f64,
}

impl TimeTagStream {
    /// Validates ordering and range; records must be sorted by tick.
    pub fn new(records: Vec<Tag>, tick: f64, duration: f64) -> Result<Self> {
        crate::error::positive("tick", tick)?;
        crate::error::non_negative("duration", duration)?;
        if let Some(k) = records.windows(2).position(|w| w[1].tick < w[0].tick) {
            return Err(Error::Invalid(alloc::format!(
                "record {} is earlier than record {}",
                k + 1,
                k
            )));
        }
        let limit = (duration / tick).ceil();
        if let Some(last) = records.last() {
            if last.tick as f64 >= limit {
                return Err(Error::Invalid(alloc::format!(
                    "tick {} lies beyond the {duration} s acquisition",
                    last.tick
                )));
            }
        }
        Ok(Self {
            records,
            tick,
            duration,
        })
    }

    pub fn records(&self) -> &[Tag] {
        &self.records
    }

    pub fn tick(&self) -> f64 {
        self.tick
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Timestamps (ticks) of one channel, in order.
    pub fn channel_ticks(&self, channel: Channel) -> Vec<u64> {
        self.records
            .iter()
            .filter(|t| t.channel == channel)
            .map(|t| t.tick)
            .collect()
    }

    pub fn singles(&self, channel: Channel) -> usize {
        self.records.iter().filter(|t| t.channel == channel).count()
    }

    /// Singles per channel in consecutive windows of `window` seconds.
    pub fn singles_in_windows(&self, channel: Channel, window: f64) -> Vec<u64> {
        let n = (self.duration / window).floor().max(0.0) as usize;
        let mut counts = alloc::vec![0u64; n];
        for t in self.records.iter().filter(|t| t.channel == channel) {
            let k = (t.tick as f64 * self.tick / window) as usize;
            if k < n {
                counts[k] += 1;
            }
        }
        counts
    }
}
