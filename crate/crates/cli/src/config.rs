//! Run configuration read from TOML. Frequencies are given in Hz (cycles per
//! second, so `delta_omega_hz = 15.65e9` means a 15.65 GHz shift) and times
//! in seconds. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use cfi_core::grid::{jsa_to_jta_2d, jsa_to_jta_cw, make_dual_grids};
use cfi_core::interferometer::{cfi_visibility_2d, cfi_visibility_cw, CfiConfig};
use cfi_core::sim::{
    ArmLosses, DetectorModel, DriftModel, Experiment, ShifterModel, Source, VisibilityPenalties,
};
use cfi_core::states::{flat_top_jsa, gaussian_cw_jsa, FlatTopPhaseParams};
use cfi_core::units::{beta2_from_dispersion, hz_to_rad};
use cfi_core::{FrequencyGrid, JointSpectralAmplitude2D, SpectralAmplitude1D};
use serde::Deserialize;

use crate::error::{Result, ToolError};
use crate::formats;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridSection,
    pub state: StateSection,
    #[serde(default)]
    pub cfi: CfiSection,
    #[serde(default)]
    pub detector: DetectorSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub points: usize,
    /// Full frequency span of the grid (Hz).
    pub span_hz: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            points: 4096,
            span_hz: 409.6e9,
        }
    }
}

/// Exactly one of `[state.flat_top]`, `[state.gaussian]` or `[state.tabulated]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSection {
    FlatTop(FlatTopSection),
    Gaussian(GaussianSection),
    Tabulated(TabulatedSection),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatTopSection {
    /// Half width of the spectrum (Hz).
    #[serde(default = "FlatTopSection::default_outer")]
    pub outer_hz: f64,
    /// Detuning where the phase band starts (Hz).
    #[serde(default = "FlatTopSection::default_inner")]
    pub inner_hz: f64,
    #[serde(default)]
    pub phi_rad: f64,
}

impl FlatTopSection {
    fn default_outer() -> f64 {
        160e9
    }
    fn default_inner() -> f64 {
        80e9
    }
}

/// cw Gaussian state with temporal correlation width `sigma_cor_s`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSection {
    pub sigma_cor_s: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedSection {
    /// Amplitude CSV; relative paths are resolved against the config file.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CfiSection {
    pub delta_omega_hz: f64,
    pub phi_s: f64,
    pub phi_i: f64,
    pub eta: f64,
    pub dispersion_ns_per_nm: f64,
    pub center_wavelength_nm: f64,
}

impl Default for CfiSection {
    fn default() -> Self {
        Self {
            delta_omega_hz: 15.65e9,
            phi_s: 0.0,
            phi_i: 0.0,
            eta: 1.0,
            dispersion_ns_per_nm: 10.0,
            center_wavelength_nm: 1560.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub efficiency: f64,
    pub jitter_s: f64,
    pub dark_rate_hz: f64,
    pub tick_s: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        let d = DetectorModel::snspd();
        Self {
            efficiency: d.efficiency,
            jitter_s: d.jitter_sigma,
            dark_rate_hz: d.dark_rate,
            tick_s: d.tick,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    /// Emitted pairs per second.
    pub pair_rate: f64,
    /// Length of the simulated tag stream (s).
    pub duration_s: f64,
    /// Fringe-scan bins and their integration time.
    pub bins: usize,
    pub bin_s: f64,
    /// Central-peak coincidence window used for the fringe scan (s).
    pub window_s: f64,
    pub drift_rad_per_min: f64,
    pub phi0_rad: f64,
    /// Omit for ideal shifters.
    pub carrier_suppression_db: Option<f64>,
    pub signal_loss_db: f64,
    pub idler_loss_db: f64,
    pub multi_pair: f64,
    pub modulator_dispersion: f64,
    pub extra_sidebands: f64,
    pub phase_noise_rms_rad: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let losses = ArmLosses::laboratory();
        let penalties = VisibilityPenalties::default();
        Self {
            pair_rate: 2e6,
            duration_s: 1.0,
            bins: 40,
            bin_s: 30.0,
            window_s: 1e-9,
            drift_rad_per_min: 0.3,
            phi0_rad: 0.0,
            carrier_suppression_db: Some(25.0),
            signal_loss_db: losses.signal_db,
            idler_loss_db: losses.idler_db,
            multi_pair: penalties.multi_pair,
            modulator_dispersion: penalties.modulator_dispersion,
            extra_sidebands: penalties.extra_sidebands,
            phase_noise_rms_rad: penalties.phase_noise_rms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("cfi-out"),
            svg: true,
        }
    }
}

/// A biphoton state built from the configuration.
#[derive(Debug, Clone)]
pub enum State {
    Cw(SpectralAmplitude1D),
    Joint(JointSpectralAmplitude2D),
}

impl State {
    /// Visibility at the shift `delta_omega` (rad/s).
    pub fn visibility(&self, delta_omega: f64) -> Result<f64> {
        Ok(match self {
            State::Cw(s) => cfi_visibility_cw(&jsa_to_jta_cw(s, &s.grid().dual())?.intensity(), delta_omega)?,
            State::Joint(s) => {
                let (ts, ti) = (s.grid_s().dual(), s.grid_i().dual());
                cfi_visibility_2d(&jsa_to_jta_2d(s, &ts, &ti, None)?.intensity(), delta_omega)?
            }
        })
    }
}

fn invalid(message: impl Into<String>) -> ToolError {
    ToolError::Validation(message.into())
}

fn require(ok: bool, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(message))
    }
}

impl RunConfig {
    /// Parses TOML text. `base` resolves relative paths.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| invalid(format!("configuration: {e}")))?;
        if let StateSection::Tabulated(t) = &mut cfg.state {
            if t.path.is_relative() {
                t.path = base.join(&t.path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ToolError::Validation(m) => invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        require(self.grid.points.is_power_of_two() && self.grid.points >= 8, "grid.points must be a power of two >= 8")?;
        require(pos(self.grid.span_hz), "grid.span_hz must be positive")?;
        match &self.state {
            StateSection::FlatTop(f) => {
                require(pos(f.inner_hz) && f.inner_hz < f.outer_hz, "state.flat_top needs 0 < inner_hz < outer_hz")?;
                require(f.phi_rad.is_finite(), "state.flat_top.phi_rad must be finite")?;
            }
            StateSection::Gaussian(g) => require(pos(g.sigma_cor_s), "state.gaussian.sigma_cor_s must be positive")?,
            StateSection::Tabulated(_) => {}
        }
        let c = &self.cfi;
        require(nonneg(c.delta_omega_hz), "cfi.delta_omega_hz must be non-negative")?;
        require(unit(c.eta), "cfi.eta must lie in [0, 1]")?;
        require(c.phi_s.is_finite() && c.phi_i.is_finite(), "cfi phases must be finite")?;
        require(c.dispersion_ns_per_nm.is_finite(), "cfi.dispersion_ns_per_nm must be finite")?;
        require(pos(c.center_wavelength_nm), "cfi.center_wavelength_nm must be positive")?;
        let d = &self.detector;
        require(unit(d.efficiency), "detector.efficiency must lie in [0, 1]")?;
        require(nonneg(d.jitter_s), "detector.jitter_s must be non-negative")?;
        require(nonneg(d.dark_rate_hz), "detector.dark_rate_hz must be non-negative")?;
        require(pos(d.tick_s), "detector.tick_s must be positive")?;
        let s = &self.simulation;
        require(nonneg(s.pair_rate), "simulation.pair_rate must be non-negative")?;
        require(pos(s.duration_s), "simulation.duration_s must be positive")?;
        require(s.bins > 0, "simulation.bins must be positive")?;
        require(pos(s.bin_s), "simulation.bin_s must be positive")?;
        require(nonneg(s.window_s), "simulation.window_s must be non-negative")?;
        require(s.drift_rad_per_min.is_finite() && s.phi0_rad.is_finite(), "drift parameters must be finite")?;
        require(s.carrier_suppression_db.map_or(true, nonneg), "simulation.carrier_suppression_db must be non-negative")?;
        require(nonneg(s.signal_loss_db) && nonneg(s.idler_loss_db), "arm losses must be non-negative")?;
        for (name, x) in [
            ("multi_pair", s.multi_pair),
            ("modulator_dispersion", s.modulator_dispersion),
            ("extra_sidebands", s.extra_sidebands),
        ] {
            require(unit(x), &format!("simulation.{name} must lie in [0, 1]"))?;
        }
        require(nonneg(s.phase_noise_rms_rad), "simulation.phase_noise_rms_rad must be non-negative")
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        Ok(make_dual_grids(self.grid.points, hz_to_rad(self.grid.span_hz))?.0)
    }

    /// Second-order dispersion of the signal arm (s^2).
    pub fn beta2(&self) -> f64 {
        beta2_from_dispersion(self.cfi.dispersion_ns_per_nm, self.cfi.center_wavelength_nm)
    }

    pub fn cfi_config(&self) -> Result<CfiConfig> {
        let c = &self.cfi;
        Ok(CfiConfig::new(hz_to_rad(c.delta_omega_hz), c.phi_s, c.phi_i, c.eta, self.beta2())?)
    }

    /// Flat-top parameters with the phase replaced by `phi`, if the state is a flat-top.
    pub fn flat_top_params(&self, phi: f64) -> Result<FlatTopPhaseParams> {
        match &self.state {
            StateSection::FlatTop(f) => Ok(FlatTopPhaseParams::new(hz_to_rad(f.outer_hz), hz_to_rad(f.inner_hz), phi)?),
            _ => Err(invalid("a phase sweep needs a [state.flat_top] state")),
        }
    }

    pub fn state(&self) -> Result<State> {
        let delta = hz_to_rad(self.cfi.delta_omega_hz);
        Ok(match &self.state {
            StateSection::FlatTop(f) => State::Cw(flat_top_jsa(&self.flat_top_params(f.phi_rad)?, &self.frequency_grid()?, delta)?),
            StateSection::Gaussian(g) => State::Cw(gaussian_cw_jsa(g.sigma_cor_s, &self.frequency_grid()?)?),
            StateSection::Tabulated(t) => {
                if formats::is_amplitude_2d(&t.path)? {
                    State::Joint(formats::read_amplitude_2d(&t.path)?.0)
                } else {
                    State::Cw(formats::read_amplitude_1d(&t.path)?.0)
                }
            }
        })
    }

    pub fn detector(&self) -> Result<DetectorModel> {
        let d = &self.detector;
        Ok(DetectorModel::new(d.efficiency, d.jitter_s, d.dark_rate_hz, d.tick_s)?)
    }

    /// The simulated experiment. A 2-D state enters only through its visibility.
    pub fn experiment(&self) -> Result<Experiment> {
        let cfg = self.cfi_config()?;
        let source = match self.state()? {
            State::Cw(s) => Source::from_state(&s, cfg.delta_omega)?,
            joint => Source::monochromatic(joint.visibility(cfg.delta_omega)?)?,
        };
        let s = &self.simulation;
        Ok(Experiment {
            source,
            cfg,
            detector: self.detector()?,
            shifter: match s.carrier_suppression_db {
                Some(db) => ShifterModel::new(db)?,
                None => ShifterModel::ideal(),
            },
            losses: ArmLosses {
                signal_db: s.signal_loss_db,
                idler_db: s.idler_loss_db,
            },
            drift: DriftModel::from_rad_per_min(s.drift_rad_per_min, s.phi0_rad),
            penalties: VisibilityPenalties {
                multi_pair: s.multi_pair,
                modulator_dispersion: s.modulator_dispersion,
                extra_sidebands: s.extra_sidebands,
                phase_noise_rms: s.phase_noise_rms_rad,
            },
            pair_rate: s.pair_rate,
        })
    }
}
