use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::models::Experiment;
use super::tags::{Channel, Tag, TimeTagStream};
use super::{poisson, substream};
use crate::error::positive;
use crate::Result;

/// Length of the independently seeded time segments of a tag simulation.
pub const SEGMENT_SECONDS: f64 = 0.1;

#[derive(Clone, Copy)]
enum Path {
    Unshifted,
    Shifted,
}

/// Draws the exit-port outcome of a pair: each photon reaches its detector
/// with probability 1/2, and both do with probability `both`.
fn ports(rng: &mut ChaCha8Rng, both: f64) -> (bool, bool) {
    let u: f64 = rng.gen();
    if u < both {
        (true, true)
    } else if u < 0.5 {
        (true, false)
    } else if u < 1.0 - both {
        (false, true)
    } else {
        (false, false)
    }
}

struct Segment<'a> {
    experiment: &'a Experiment,
    rng: ChaCha8Rng,
    jitter: Option<Normal<f64>>,
    start: f64,
    len: f64,
    phase_offset: f64,
}

impl Segment<'_> {
    fn push(&mut self, out: &mut Vec<(f64, Channel)>, t: f64, channel: Channel) {
        let t = match &self.jitter {
            Some(j) => t + j.sample(&mut self.rng),
            None => t,
        };
        out.push((t, channel));
    }

    fn run(mut self, out: &mut Vec<(f64, Channel)>) {
        let exp = self.experiment;
        let (eta_s, eta_i) = exp.arm_efficiencies();
        let leak = exp.shifter.residual_probability();
        let visibility = exp.effective_visibility();
        let beta2 = exp.cfg.beta2;
        let shift = exp.cfg.delta_omega;

        let pairs = poisson(&mut self.rng, exp.pair_rate * self.len);
        for _ in 0..pairs {
            let t0 = self.start + self.rng.gen::<f64>() * self.len;
            let omega = exp.source.sample_detuning(&mut self.rng);
            let sig_path = if self.rng.gen::<bool>() { Path::Shifted } else { Path::Unshifted };
            let idl_path = if self.rng.gen::<bool>() { Path::Shifted } else { Path::Unshifted };
            // Frequency offset actually carried by each photon, in units of dW.
            let mut s_shift = matches!(sig_path, Path::Shifted) as u8;
            let mut i_shift = matches!(idl_path, Path::Shifted) as u8;
            let mut leaked = false;
            if s_shift == 1 && self.rng.gen::<f64>() < leak {
                s_shift = 0;
                leaked = true;
            }
            if i_shift == 1 && self.rng.gen::<f64>() < leak {
                i_shift = 0;
                leaked = true;
            }
            let interfering = !leaked
                && matches!(
                    (sig_path, idl_path),
                    (Path::Unshifted, Path::Unshifted) | (Path::Shifted, Path::Shifted)
                );
            let both = if interfering {
                let phi = exp.phase_at(t0) + self.phase_offset;
                (1.0 + visibility * phi.cos()) / 4.0
            } else {
                0.5
            };
            let (s_port, i_port) = ports(&mut self.rng, both);
            // Signal: detuning w + s dW through beta2. Idler: detuning -(w + i dW)
            // through -beta2. The common term beta2 w cancels in t_S - t_I.
            if s_port && self.rng.gen::<f64>() < eta_s {
                let t = t0 + beta2 * (omega + s_shift as f64 * shift);
                self.push(out, t, Channel::Signal);
            }
            if i_port && self.rng.gen::<f64>() < eta_i {
                let t = t0 + beta2 * (omega + i_shift as f64 * shift);
                self.push(out, t, Channel::Idler);
            }
        }

        for channel in [Channel::Signal, Channel::Idler] {
            let darks = poisson(&mut self.rng, exp.detector.dark_rate * self.len);
            for _ in 0..darks {
                let t = self.start + self.rng.gen::<f64>() * self.len;
                out.push((t, channel));
            }
        }
    }
}

/// Simulates a cw acquisition of `duration` seconds. Identical seeds give
/// identical streams.
///
/// Per pair: emission time uniform in the acquisition, ridge detuning from the
/// JSI, independent 50/50 path choices in the two MZIs, residual-carrier
/// leakage in shifted arms, exit ports as in [`super::expected_rates`], loss
/// thinning, dispersion delay, Gaussian jitter. Dark counts are independent
/// Poisson processes. Times are floored to tagger ticks and tags outside
/// `[0, duration)` are dropped.
pub fn simulate_timetags(experiment: &Experiment, duration: f64, seed: u64) -> Result<TimeTagStream> {
    positive("duration", duration)?;
    let tick = experiment.detector.tick;
    let jitter = (experiment.detector.jitter_sigma > 0.0)
        .then(|| Normal::new(0.0, experiment.detector.jitter_sigma).expect("finite jitter"));
    let noise_rms = experiment.penalties.phase_noise_rms;
    let segments = (duration / SEGMENT_SECONDS).ceil().max(1.0) as u64;

    let mut events: Vec<(f64, Channel)> = Vec::new();
    for k in 0..segments {
        let start = k as f64 * SEGMENT_SECONDS;
        let len = SEGMENT_SECONDS.min(duration - start);
        let mut rng = substream(seed, k + 1);
        let phase_offset = if noise_rms > 0.0 {
            Normal::new(0.0, noise_rms).expect("finite noise").sample(&mut rng)
        } else {
            0.0
        };
        Segment {
            experiment,
            rng,
            jitter,
            start,
            len,
            phase_offset,
        }
        .run(&mut events);
    }

    let limit = (duration / tick).ceil() as u64;
    let mut records: Vec<Tag> = events
        .into_iter()
        .filter(|(t, _)| *t >= 0.0)
        .map(|(t, channel)| Tag {
            tick: (t / tick).floor() as u64,
            channel,
        })
        .filter(|tag| tag.tick < limit && (tag.tick as f64 * tick) < duration)
        .collect();
    records.sort_unstable();
    TimeTagStream::new(records, tick, duration)
}
