use std::path::Path;

use cfi_tools::config::{StateSection, State};
use cfi_tools::RunConfig;

fn parse(text: &str) -> cfi_tools::Result<RunConfig> {
    RunConfig::parse(text, Path::new("/data"))
}

fn err(text: &str) -> String {
    let e = parse(text).unwrap_err();
    assert_eq!(e.exit_code(), 1);
    e.to_string()
}

#[test]
fn defaults_describe_the_demonstration() {
    let cfg = parse("[state.flat_top]\n").unwrap();
    assert_eq!(cfg.grid.points, 4096);
    assert_eq!(cfg.cfi.delta_omega_hz, 15.65e9);
    assert!((cfg.beta2() / 1.2919e-20 - 1.0).abs() < 1e-3);
    let exp = cfg.experiment().unwrap();
    assert!((exp.side_peak_delay() - 1.27e-9).abs() < 0.01e-9);
    let State::Cw(s) = cfg.state().unwrap() else { panic!("cw state expected") };
    let v = State::Cw(s).visibility(cfg.cfi_config().unwrap().delta_omega).unwrap();
    assert!((v - 0.951).abs() < 1e-3);
}

#[test]
fn unknown_keys_are_rejected_with_their_line() {
    let m = err("[state.flat_top]\nphi_rad = 1.0\n\n[cfi]\ndelta_omega = 1e9\n");
    assert!(m.contains("line 5") && m.contains("delta_omega"), "{m}");
    assert!(err("[state.flat_top]\n[outputs]\n").contains("outputs"));
}

#[test]
fn exactly_one_state() {
    err("[cfi]\neta = 1.0\n");
    err("[state.flat_top]\n[state.gaussian]\nsigma_cor_s = 1e-12\n");
    err("[state.triangle]\n");
}

#[test]
fn physical_ranges_are_checked() {
    assert!(err("[state.gaussian]\nsigma_cor_s = -1.0\n").contains("sigma_cor_s"));
    assert!(err("[state.flat_top]\ninner_hz = 200e9\n").contains("inner_hz"));
    assert!(err("[state.flat_top]\n[cfi]\neta = 1.5\n").contains("eta"));
    assert!(err("[state.flat_top]\n[grid]\npoints = 1000\n").contains("power of two"));
    assert!(err("[state.flat_top]\n[detector]\ntick_s = 0.0\n").contains("tick_s"));
    assert!(err("[state.flat_top]\n[simulation]\nbins = 0\n").contains("bins"));
}

#[test]
fn tabulated_paths_resolve_against_the_config() {
    let cfg = parse("[state.tabulated]\npath = \"jsa.csv\"\n").unwrap();
    let StateSection::Tabulated(t) = &cfg.state else { panic!() };
    assert_eq!(t.path, Path::new("/data/jsa.csv"));
}

#[test]
fn guard_band_violations_surface_as_validation_errors() {
    let cfg = parse("[state.flat_top]\n[grid]\nspan_hz = 330e9\n").unwrap();
    assert_eq!(cfg.state().unwrap_err().exit_code(), 1);
}
