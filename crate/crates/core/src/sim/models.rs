use alloc::vec::Vec;
use rand::Rng;

use crate::error::{non_negative, positive, unit_interval};
use crate::grid::{jsa_to_jta_cw, Axis, FrequencyGrid, SpectralAmplitude1D};
use crate::interferometer::{cfi_visibility_cw, CfiConfig};
use crate::units::db_to_transmission;
use crate::Result;

/// Single-photon detector plus time tagger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
    /// rms Gaussian timing jitter (s).
    pub jitter_sigma: f64,
    /// Dark counts per second per channel.
    pub dark_rate: f64,
    /// Time-tagger resolution (s).
    pub tick: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, jitter_sigma: f64, dark_rate: f64, tick: f64) -> Result<Self> {
        unit_interval("efficiency", efficiency)?;
        non_negative("jitter_sigma", jitter_sigma)?;
        non_negative("dark_rate", dark_rate)?;
        positive("tick", tick)?;
        Ok(Self {
            efficiency,
            jitter_sigma,
            dark_rate,
            tick,
        })
    }

    /// WSi SNSPDs (80 % efficiency, 120 ps jitter) read by a 128 ps tagger.
    pub fn snspd() -> Self {
        Self {
            efficiency: 0.8,
            jitter_sigma: 120e-12,
            dark_rate: 100.0,
            tick: 128e-12,
        }
    }
}

/// Frequency shifters: the signal arm shifts by `+dW`, the idler arm by `-dW`.
/// A fraction `10^(-suppression/10)` of the photons in a shifted arm leave at
/// the unshifted carrier frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShifterModel {
    pub carrier_suppression_db: f64,
}

impl ShifterModel {
    pub fn new(carrier_suppression_db: f64) -> Result<Self> {
        non_negative("carrier_suppression_db", carrier_suppression_db)?;
        Ok(Self {
            carrier_suppression_db,
        })
    }

    pub fn ideal() -> Self {
        Self {
            carrier_suppression_db: f64::INFINITY,
        }
    }

    pub fn residual_probability(&self) -> f64 {
        if self.carrier_suppression_db.is_infinite() {
            0.0
        } else {
            db_to_transmission(self.carrier_suppression_db)
        }
    }
}

/// Linear thermal drift of the phase sum, `phi_T(t) = phi0 + rate * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftModel {
    /// rad/s
    pub rate: f64,
    pub phi0: f64,
}

impl DriftModel {
    pub fn none() -> Self {
        Self {
            rate: 0.0,
            phi0: 0.0,
        }
    }

    pub fn from_rad_per_min(rate: f64, phi0: f64) -> Self {
        Self {
            rate: rate / 60.0,
            phi0,
        }
    }

    pub fn phase_at(&self, t: f64) -> f64 {
        self.phi0 + self.rate * t
    }
}

/// Insertion losses ahead of the detectors (MZI plus dispersion module), dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmLosses {
    pub signal_db: f64,
    pub idler_db: f64,
}

impl ArmLosses {
    pub fn none() -> Self {
        Self {
            signal_db: 0.0,
            idler_db: 0.0,
        }
    }

    /// 18.6 dB / 22.7 dB MZIs, each followed by a 3 dB dispersion module.
    pub fn laboratory() -> Self {
        Self {
            signal_db: 18.6 + 3.0,
            idler_db: 22.7 + 3.0,
        }
    }
}

/// Multiplicative visibility penalties standing in for effects that are not
/// simulated physically, and an optional per-bin Gaussian phase blur.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityPenalties {
    pub multi_pair: f64,
    pub modulator_dispersion: f64,
    pub extra_sidebands: f64,
    /// rms of a Gaussian phase jitter added per scan bin or tag segment (rad).
    pub phase_noise_rms: f64,
}

impl Default for VisibilityPenalties {
    fn default() -> Self {
        Self {
            multi_pair: 0.004,
            modulator_dispersion: 0.0,
            extra_sidebands: 0.0,
            phase_noise_rms: 0.0,
        }
    }
}

impl VisibilityPenalties {
    pub fn none() -> Self {
        Self {
            multi_pair: 0.0,
            ..Self::default()
        }
    }

    pub fn factor(&self) -> f64 {
        (1.0 - self.multi_pair) * (1.0 - self.modulator_dispersion) * (1.0 - self.extra_sidebands)
    }
}

/// The biphoton source as the simulator sees it: a sampler for the ridge
/// detuning and the state's ideal CFI visibility.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    grid: Option<FrequencyGrid>,
    cdf: Vec<f64>,
    visibility: f64,
}

impl Source {
    /// Source emitting the given cw state; its visibility is evaluated at `delta_omega`.
    pub fn from_state(state: &SpectralAmplitude1D, delta_omega: f64) -> Result<Self> {
        let jti = jsa_to_jta_cw(state, &state.grid().dual())?.intensity();
        let visibility = cfi_visibility_cw(&jti, delta_omega)?;
        let mut cdf = Vec::with_capacity(state.values().len());
        let mut acc = 0.0;
        for v in state.values() {
            acc += v.norm_sqr();
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self {
            grid: Some(*state.grid()),
            cdf,
            visibility,
        })
    }

    /// Source with zero bandwidth and a prescribed visibility.
    pub fn monochromatic(visibility: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&visibility) {
            return Err(crate::Error::OutOfRange {
                name: "visibility",
                value: visibility,
                range: "[-1, 1]",
            });
        }
        Ok(Self {
            grid: None,
            cdf: Vec::new(),
            visibility,
        })
    }

    pub fn with_visibility(mut self, visibility: f64) -> Self {
        self.visibility = visibility;
        self
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    /// Detuning drawn from the JSI: a grid bin by inverse CDF, then uniform
    /// within the bin.
    pub fn sample_detuning<R: Rng>(&self, rng: &mut R) -> f64 {
        let Some(grid) = self.grid else {
            return 0.0;
        };
        let u: f64 = rng.gen();
        let k = self.cdf.partition_point(|c| *c < u).min(self.cdf.len() - 1);
        grid.point(k) + (rng.gen::<f64>() - 0.5) * grid.d_omega()
    }
}

/// Everything the simulator needs about one experimental run.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub source: Source,
    pub cfg: CfiConfig,
    pub detector: DetectorModel,
    pub shifter: ShifterModel,
    pub losses: ArmLosses,
    pub drift: DriftModel,
    pub penalties: VisibilityPenalties,
    /// Emitted pairs per second.
    pub pair_rate: f64,
}

impl Experiment {
    /// Signal and idler detection efficiencies including losses.
    pub fn arm_efficiencies(&self) -> (f64, f64) {
        let base = self.cfg.eta * self.detector.efficiency;
        (
            base * db_to_transmission(self.losses.signal_db),
            base * db_to_transmission(self.losses.idler_db),
        )
    }

    /// Visibility after the multiplicative penalties.
    pub fn effective_visibility(&self) -> f64 {
        self.source.visibility * self.penalties.factor()
    }

    /// Phase sum at time `t`: static MZI phases plus drift.
    pub fn phase_at(&self, t: f64) -> f64 {
        self.cfg.phi_t() + self.drift.phase_at(t)
    }

    /// Center-to-side-peak delay `beta2 * dW`.
    pub fn side_peak_delay(&self) -> f64 {
        self.cfg.beta2 * self.cfg.delta_omega
    }

    /// Frequency resolution of the dispersive mapping, `sqrt(2) jitter / |beta2|`
    /// in rad/s.
    pub fn frequency_resolution(&self) -> f64 {
        core::f64::consts::SQRT_2 * self.detector.jitter_sigma / self.cfg.beta2.abs()
    }
}
