//! The subcommands. Each writes its files into an output directory and
//! returns the console summary.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use cfi_core::analysis::{
    build_histogram, find_peaks, fit_fringe, map_time_to_frequency, visibility_minmax_scan,
};
use cfi_core::grid::{jsa_to_jta_2d, jsa_to_jta_cw, make_dual_grids};
use cfi_core::interferometer::{
    cfi_probability_2d, cfi_visibility_cw, cfi_visibility_freq, fringe_visibility,
    gaussian_visibility_closed_form, sweep_phi_t,
};
use cfi_core::retrieval::{canonicalize, gerchberg_saxton, RetrievalOptions};
use cfi_core::sim::{expected_rates, simulate_drift_scan, Experiment, simulate_timetags, FringeScan, TimeTagStream};
use cfi_core::states::{flat_top_jsa, gaussian_cw_jsa, FlatTopPhaseParams};
use cfi_core::units::{hz_to_rad, rad_to_hz};

use crate::config::{CfiSection, DetectorSection, RunConfig, State};
use crate::error::{Result, ToolError};
use crate::formats::{self, Param};
use crate::plot::write_plot;
use crate::tagfile;

/// Console output of a command.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
    /// Failed checks (selftest only).
    pub failed: usize,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn file(&mut self, dir: &Path, name: &str) -> PathBuf {
        let p = dir.join(name);
        self.files.push(p.clone());
        p
    }
}

fn prepare(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))
}

/// Visibility of the configured state; with `sweep = Some(n)` also the
/// visibility of the flat-top family at `n` phases spread over [0, 2 pi].
pub fn visibility(cfg: &RunConfig, sweep: Option<usize>, out: &Path) -> Result<Report> {
    let delta = hz_to_rad(cfg.cfi.delta_omega_hz);
    let state = cfg.state()?;
    let v = state.visibility(delta)?;
    prepare(out)?;
    let mut r = Report::default();
    r.line(format!("V = {v:.4}"));
    r.line(format!("shift dW/2pi = {:.4} GHz", cfg.cfi.delta_omega_hz * 1e-9));
    if let State::Cw(s) = &state {
        let jta = jsa_to_jta_cw(s, &s.grid().dual())?;
        formats::write_amplitude_1d(&r.file(out, "jsa.csv"), s)?;
        formats::write_temporal_1d(&r.file(out, "jta.csv"), &jta)?;
        formats::write_jsi(&r.file(out, "jsi.csv"), &s.intensity())?;
        formats::write_jti(&r.file(out, "jti.csv"), &jta.intensity())?;
    }
    if let Some(n) = sweep {
        if n < 2 {
            return Err(ToolError::Validation("--sweep needs at least 2 points".into()));
        }
        let grid = cfg.frequency_grid()?;
        let rows = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / (n - 1) as f64;
                let s = flat_top_jsa(&cfg.flat_top_params(phi)?, &grid, delta)?;
                Ok((phi, State::Cw(s).visibility(delta)?))
            })
            .collect::<Result<Vec<_>>>()?;
        formats::write_pairs(&r.file(out, "visibility_sweep.csv"), formats::VISIBILITY_SWEEP, &rows)?;
        if cfg.output.svg {
            write_plot(&r.file(out, "visibility_sweep.svg"), "CFI visibility", "phi (rad)", "V", &rows)?;
        }
        r.line(format!("sweep: {n} phases written"));
    }
    Ok(r)
}

/// Coincidence probability against the phase sum at `points` phases over [0, 2 pi].
pub fn sweep_phi(cfg: &RunConfig, points: usize, out: &Path) -> Result<Report> {
    if points < 2 {
        return Err(ToolError::Validation("--points must be at least 2".into()));
    }
    let cfi = cfg.cfi_config()?;
    let phis: Vec<f64> = (0..points).map(|k| 2.0 * PI * k as f64 / (points - 1) as f64).collect();
    let rows = match cfg.state()? {
        State::Cw(s) => sweep_phi_t(&jsa_to_jta_cw(&s, &s.grid().dual())?.intensity(), &cfi, &phis)?,
        State::Joint(s) => {
            let jti = jsa_to_jta_2d(&s, &s.grid_s().dual(), &s.grid_i().dual(), None)?.intensity();
            phis.iter()
                .map(|&p| Ok((p, cfi_probability_2d(&jti, &cfi.with_phi_t(p))?)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    prepare(out)?;
    let mut r = Report::default();
    formats::write_pairs(&r.file(out, "probability_sweep.csv"), formats::PROBABILITY_SWEEP, &rows)?;
    if cfg.output.svg {
        write_plot(&r.file(out, "probability_sweep.svg"), "CFI fringe", "phi_T (rad)", "P_c", &rows)?;
    }
    let probs: Vec<f64> = rows.iter().map(|p| p.1).collect();
    if let Some(v) = fringe_visibility(&probs) {
        r.line(format!("fringe visibility = {v:.4} over {points} phases"));
    }
    Ok(r)
}

/// Simulated tag stream and drift scan, reproducible from `seed`.
pub fn simulate(cfg: &RunConfig, seed: u64, tags_csv: bool, out: &Path) -> Result<Report> {
    let exp = cfg.experiment()?;
    let s = &cfg.simulation;
    let stream = simulate_timetags(&exp, s.duration_s, seed)?;
    let scan = simulate_drift_scan(&exp, s.window_s, s.bin_s, s.bins, seed)?;
    prepare(out)?;
    let mut r = Report::default();
    tagfile::write_tags(&r.file(out, "tags.cfitag"), &stream)?;
    if tags_csv {
        formats::write_tags_csv(&r.file(out, "tags.csv"), &stream)?;
    }
    formats::write_scan(&r.file(out, "scan.csv"), &scan)?;
    if cfg.output.svg {
        write_plot(&r.file(out, "scan.svg"), "Drift scan", "phi_T (rad)", "coincidences", &scan_points(&scan))?;
    }
    r.line(format!("tags: {} over {} s (seed {seed})", stream.len(), s.duration_s));
    r.line(format!("state V = {:.4}", exp.effective_visibility()));
    r.line(format!("expected scan V = {:.4}", expected_scan_visibility(&exp, s.window_s)));
    r.line(format!("side-peak delay = {:.4} ns", exp.side_peak_delay() * 1e9));
    r.line(format!("scan: {} bins of {} s", scan.points.len(), s.bin_s));
    Ok(r)
}

/// Contrast of the central-peak rate including carrier leakage and accidentals.
pub fn expected_scan_visibility(exp: &Experiment, window: f64) -> f64 {
    let max = expected_rates(exp, 0.0).central_with_accidentals(window);
    let min = expected_rates(exp, PI).central_with_accidentals(window);
    (max - min) / (max + min)
}

fn scan_points(scan: &FringeScan) -> Vec<(f64, f64)> {
    scan.points.iter().map(|p| (p.phi_t, p.coincidences as f64)).collect()
}

/// Interferometer and detector settings used to interpret a tag stream.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub cfi: CfiSection,
    pub detector: DetectorSection,
    pub svg: bool,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            cfi: CfiSection::default(),
            detector: DetectorSection::default(),
            svg: true,
        }
    }
}

impl From<&RunConfig> for AnalysisSettings {
    fn from(cfg: &RunConfig) -> Self {
        Self {
            cfi: cfg.cfi.clone(),
            detector: cfg.detector.clone(),
            svg: cfg.output.svg,
        }
    }
}

enum Input {
    Scan(FringeScan),
    Stream(TimeTagStream),
}

fn read_input(path: &Path, settings: &AnalysisSettings) -> Result<Input> {
    let bytes = std::fs::read(path).map_err(|e| ToolError::io(path, e))?;
    let starts = |header: &[&str]| {
        let h = header.join(",");
        bytes.starts_with(h.as_bytes()) && matches!(bytes.get(h.len()), None | Some(b'\n' | b'\r'))
    };
    if starts(formats::SCAN) {
        Ok(Input::Scan(formats::read_scan(path)?))
    } else if starts(formats::TAGS) {
        Ok(Input::Stream(formats::read_tags_csv(path, settings.detector.tick_s)?))
    } else {
        tagfile::decode(&bytes).map(Input::Stream).map_err(|m| ToolError::format(path, m))
    }
}

/// Histogram and peaks of a tag stream, or fringe fit of a scan.
pub fn analyze(input: &Path, settings: &AnalysisSettings, out: &Path) -> Result<Report> {
    match read_input(input, settings)? {
        Input::Scan(scan) => analyze_scan(&scan, settings, out),
        Input::Stream(stream) => analyze_stream(&stream, settings, out),
    }
}

fn analyze_scan(scan: &FringeScan, settings: &AnalysisSettings, out: &Path) -> Result<Report> {
    let fit = fit_fringe(scan)?;
    let mm = visibility_minmax_scan(scan)?;
    prepare(out)?;
    let mut r = Report::default();
    let params = [
        Param::new("amplitude", fit.amplitude, Some(fit.amplitude_sigma())),
        Param::new("visibility", fit.visibility.v, Some(fit.visibility.sigma_v)),
        Param::new("phase_offset", fit.phase_offset, Some(fit.phase_sigma())),
        Param::new("chi2", fit.chi2, None),
        Param::new("dof", fit.dof as f64, None),
    ];
    formats::write_params(&r.file(out, "fit.csv"), &params)?;
    let vis = [
        Param::new("fit", fit.visibility.v, Some(fit.visibility.sigma_v)),
        Param::new("minmax", mm.v, Some(mm.sigma_v)),
    ];
    formats::write_params(&r.file(out, "visibility.csv"), &vis)?;
    if settings.svg {
        write_plot(&r.file(out, "scan.svg"), "Fringe scan", "phi_T (rad)", "coincidences", &scan_points(scan))?;
    }
    r.line(format!("V = {:.4} +- {:.4} (fit, chi2/dof = {:.2})", fit.visibility.v, fit.visibility.sigma_v, fit.chi2 / fit.dof.max(1) as f64));
    r.line(format!("V = {:.4} +- {:.4} (min/max)", mm.v, mm.sigma_v));
    if fit.clamped {
        r.warnings.push("fitted visibility exceeded 1 and was clamped".into());
    }
    Ok(r)
}

fn analyze_stream(stream: &TimeTagStream, settings: &AnalysisSettings, out: &Path) -> Result<Report> {
    let beta2 = cfi_core::units::beta2_from_dispersion(settings.cfi.dispersion_ns_per_nm, settings.cfi.center_wavelength_nm);
    let sep = (beta2 * hz_to_rad(settings.cfi.delta_omega_hz)).abs();
    let window = 3.0 * sep + 2e-9;
    let hist = build_histogram(stream, window, stream.tick())?;
    let mut r = Report::default();
    if stream.is_empty() {
        r.warnings.push("stream contains no tags; reports are empty".into());
    }
    let peaks = if stream.is_empty() { Vec::new() } else { find_peaks(&hist, sep)?.peaks };
    prepare(out)?;
    formats::write_histogram(&r.file(out, "histogram.csv"), &hist)?;
    formats::write_peaks(&r.file(out, "peaks.csv"), &peaks)?;
    if settings.svg {
        let pts: Vec<(f64, f64)> = hist.centers().zip(&hist.counts).map(|(t, &c)| (t, c as f64)).collect();
        write_plot(&r.file(out, "histogram.svg"), "Coincidence histogram", "t_S - t_I (s)", "counts", &pts)?;
    }
    r.line(format!(
        "tags: {} ({} signal, {} idler), coincidences in window: {}",
        stream.len(),
        stream.singles(cfi_core::sim::Channel::Signal),
        stream.singles(cfi_core::sim::Channel::Idler),
        hist.total()
    ));
    for p in &peaks {
        r.line(format!("peak at {:.4} ns: area {:.1}, rms {:.1} ps", p.center * 1e9, p.area, p.rms_width * 1e12));
    }
    if peaks.len() == 3 {
        let d = (peaks[2].center - peaks[0].center) / 2.0;
        let jitter = std::f64::consts::SQRT_2 * settings.detector.jitter_s;
        let m = map_time_to_frequency(d, beta2, jitter)?;
        r.line(format!(
            "side-peak separation {:.4} ns -> shift {:.3} GHz (resolution {:.2} GHz)",
            d * 1e9,
            rad_to_hz(m.detuning).abs() * 1e-9,
            rad_to_hz(m.resolution) * 1e-9
        ));
    } else if !stream.is_empty() {
        r.warnings.push(format!("found {} peaks, expected 3", peaks.len()));
    }
    Ok(r)
}

/// Settings for `retrieve`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrieveSettings {
    pub options: RetrievalOptions,
    /// Shift at which to report the visibility of the recovered state (Hz).
    pub delta_omega_hz: Option<f64>,
}

/// Spectral phase from a JSI and JTI pair.
pub fn retrieve(jsi: &Path, jti: &Path, settings: &RetrieveSettings, out: &Path) -> Result<Report> {
    let jsi = formats::read_jsi(jsi)?;
    let jti = formats::read_jti(jti)?;
    let result = canonicalize(&gerchberg_saxton(&jsi, &jti, &settings.options)?);
    prepare(out)?;
    let mut r = Report::default();
    formats::write_phase(&r.file(out, "phase.csv"), result.grid(), &result.phase)?;
    formats::write_amplitude_1d(&r.file(out, "jsa_retrieved.csv"), &result.state)?;
    r.line(format!(
        "magnitude residual {:.3e} after {} iterations, {} restarts",
        result.magnitude_residual, result.iterations, result.restarts
    ));
    if let Some(hz) = settings.delta_omega_hz {
        let s = &result.state;
        let v = cfi_visibility_cw(&jsa_to_jta_cw(s, &s.grid().dual())?.intensity(), hz_to_rad(hz))?;
        r.line(format!("V = {v:.4} at dW/2pi = {:.4} GHz", hz * 1e-9));
    }
    if !result.converged {
        r.warnings.push(format!("did not reach tolerance {:e}", settings.options.tol));
    }
    Ok(r)
}

/// Quick numerical self-checks against known values.
pub fn selftest() -> Result<Report> {
    let mut r = Report::default();
    let mut check = |name: &str, ok: bool, detail: String| {
        r.line(format!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" }));
        if !ok {
            r.failed += 1;
        }
    };
    let (freq, _) = make_dual_grids(4096, hz_to_rad(409.6e9))?;
    let delta = hz_to_rad(15.65e9);
    for (phi, want) in [(0.0, 0.951), (PI, 0.755)] {
        let s = flat_top_jsa(&FlatTopPhaseParams::demonstration(phi), &freq, delta)?;
        let v = State::Cw(s.clone()).visibility(delta)?;
        check("flat-top visibility", (v - want).abs() <= 1e-3, format!("phi = {phi:.4}: V = {v:.5}, want {want}"));
    }
    // The two forms agree exactly for shifts that are whole grid steps.
    let on_grid = 156.0 * freq.d_omega();
    let s = flat_top_jsa(&FlatTopPhaseParams::demonstration(PI), &freq, on_grid)?;
    let vt = State::Cw(s.clone()).visibility(on_grid)?;
    let vf = cfi_visibility_freq(&s, on_grid)?.visibility;
    check("time/frequency forms", (vt - vf).abs() < 1e-9, format!("|difference| = {:.1e}", (vt - vf).abs()));
    let sigma = 1e-12;
    let (gf, gt) = make_dual_grids(1024, 2.0 * PI * 8.0 / sigma)?;
    let jti = jsa_to_jta_cw(&gaussian_cw_jsa(sigma, &gf)?, &gt)?.intensity();
    let worst = [0.0, 1.0, 2.0, 3.0]
        .iter()
        .map(|x| {
            let v = cfi_visibility_cw(&jti, x / sigma)?;
            Ok((v - gaussian_visibility_closed_form(sigma, x / sigma)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    check("Gaussian closed form", worst < 1e-6, format!("max error {worst:.1e}"));
    Ok(r)
}
