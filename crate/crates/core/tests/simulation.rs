use std::f64::consts::PI;

use cfi_core::analysis::{build_histogram, find_peaks, fit_fringe, map_time_to_frequency, CoincidenceHistogram};
use cfi_core::interferometer::CfiConfig;
use cfi_core::sim::{
    expected_rates, simulate_drift_scan, simulate_timetags, ArmLosses, Channel, DetectorModel, DriftModel,
    Experiment, ShifterModel, Source, VisibilityPenalties,
};
use cfi_core::units::{beta2_from_dispersion, hz_to_rad, rad_to_hz};

const TICK: f64 = 128e-12;

fn experiment(v: f64, phi_t: f64, jitter: f64, pair_rate: f64) -> Experiment {
    Experiment {
        source: Source::monochromatic(v).unwrap(),
        cfg: CfiConfig::new(hz_to_rad(15.65e9), phi_t, 0.0, 1.0, beta2_from_dispersion(10.0, 1560.0)).unwrap(),
        detector: DetectorModel::new(1.0, jitter, 0.0, TICK).unwrap(),
        shifter: ShifterModel::ideal(),
        losses: ArmLosses::none(),
        drift: DriftModel::none(),
        penalties: VisibilityPenalties::none(),
        pair_rate,
    }
}

/// Counts within +-sep/2 of -sep, 0 and +sep.
fn peak_windows(h: &CoincidenceHistogram, sep: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, x) in h.centers().enumerate() {
        for (j, c) in [-sep, 0.0, sep].into_iter().enumerate() {
            if x >= c - sep / 2.0 && x < c + sep / 2.0 {
                out[j] += h.counts[k] as f64;
            }
        }
    }
    out
}

/// Upper 99 % point of chi-square (Wilson-Hilferty).
fn chi2_99(dof: f64) -> f64 {
    let z = 2.326_347_874;
    let a = 2.0 / (9.0 * dof);
    dof * (1.0 - a + z * a.sqrt()).powi(3)
}

fn chi2_constant(counts: &[u64]) -> (f64, f64) {
    let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
    let chi2 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
    (chi2, chi2_99((counts.len() - 1) as f64))
}

#[test]
fn ideal_stream_has_three_clusters_at_beta2_shift() {
    let exp = experiment(1.0, 0.0, 0.0, 2e4);
    let sep = exp.side_peak_delay();
    let stream = simulate_timetags(&exp, 1.0, 4).unwrap();
    let hist = build_histogram(&stream, 3.0 * sep, TICK).unwrap();
    let mut clusters = 0;
    let mut prev = 0;
    for &c in &hist.counts {
        if c > 0 && prev == 0 {
            clusters += 1;
        }
        prev = c;
    }
    assert_eq!(clusters, 3);
    let peaks = find_peaks(&hist, sep).unwrap();
    assert_eq!(peaks.len(), 3);
    let measured = peaks.mean_side_separation().unwrap();
    assert!((measured - 1.27e-9).abs() < TICK, "{measured}");
    assert!(peaks.central().unwrap().center.abs() < TICK);
}

#[test]
fn million_pairs_match_expected_rates() {
    let mut exp = experiment(0.9, 1.0, 0.0, 1e5);
    exp.shifter = ShifterModel::new(15.0).unwrap();
    let duration = 10.0;
    let sep = exp.side_peak_delay();
    let stream = simulate_timetags(&exp, duration, 21).unwrap();
    let hist = build_histogram(&stream, 3.0 * sep, TICK).unwrap();
    let got = peak_windows(&hist, sep);
    let r = expected_rates(&exp, 1.0);
    let want = [r.side_peak_each, r.central_peak, r.side_peak_each].map(|x| x * duration);
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 3.0 * w.sqrt(), "got {g}, want {w}");
    }
    // Unique pairing bounds the total.
    let total = hist.total() as usize;
    assert!(total <= stream.singles(Channel::Signal).min(stream.singles(Channel::Idler)));
}

#[test]
fn jittered_peaks_have_expected_width_and_ratio() {
    let exp = experiment(1.0, 0.0, 120e-12, 1e5);
    let sep = exp.side_peak_delay();
    let stream = simulate_timetags(&exp, 2.0, 8).unwrap();
    let hist = build_histogram(&stream, 3.0 * sep, TICK).unwrap();
    let peaks = find_peaks(&hist, sep).unwrap();
    assert_eq!(peaks.len(), 3);
    // Two jitters in quadrature plus two independent tick floors.
    let want = (2.0 * 120e-12f64.powi(2) + TICK * TICK / 6.0).sqrt();
    for p in &peaks.peaks {
        assert!((p.rms_width / want - 1.0).abs() < 0.15, "{} vs {want}", p.rms_width);
    }
    let [l, c, r] = peak_windows(&hist, sep);
    let side = 0.5 * (l + r);
    // Poisson sigma of c - 2 side.
    let sigma = (c + 4.0 * 0.25 * (l + r)).sqrt();
    assert!((c - 2.0 * side).abs() < 3.0 * sigma, "{c} {l} {r}");
    assert!((l - r).abs() < 3.0 * (l + r).sqrt());
}

#[test]
fn round_trip_recovers_shift_across_band() {
    // At the dark fringe the central peak vanishes, so the side peaks stay
    // resolvable even at 5 GHz, where they sit only 2.3 jitter widths out.
    for f in [5e9, 10e9, 15.65e9, 22e9, 30e9] {
        let mut exp = experiment(0.95, PI, 120e-12, 5e4);
        exp.cfg.delta_omega = hz_to_rad(f);
        let sep = exp.side_peak_delay();
        let stream = simulate_timetags(&exp, 1.0, 2).unwrap();
        // Margin for the jitter tails, so the median reflects the empty background.
        let hist = build_histogram(&stream, 3.0 * sep + 2e-9, TICK).unwrap();
        let peaks = find_peaks(&hist, sep).unwrap();
        // The residual central peak (V < 1) may or may not clear the threshold.
        assert!(peaks.len() >= 2, "{f}");
        let outer = peaks.peaks[peaks.len() - 1].center - peaks.peaks[0].center;
        let m = map_time_to_frequency(
            outer / 2.0,
            exp.cfg.beta2,
            std::f64::consts::SQRT_2 * exp.detector.jitter_sigma,
        )
        .unwrap();
        assert!((rad_to_hz(m.detuning) - f).abs() < rad_to_hz(m.resolution), "{f}: {}", rad_to_hz(m.detuning));
    }
}

#[test]
fn singles_do_not_follow_the_fringe() {
    let mut exp = experiment(1.0, 0.0, 120e-12, 2e5);
    exp.drift = DriftModel {
        rate: PI,
        phi0: 0.0,
    };
    // Two seconds cover one full fringe.
    let stream = simulate_timetags(&exp, 2.0, 17).unwrap();
    for ch in [Channel::Signal, Channel::Idler] {
        let counts = stream.singles_in_windows(ch, 0.1);
        assert_eq!(counts.len(), 20);
        let (chi2, crit) = chi2_constant(&counts);
        assert!(chi2 < crit, "{ch:?}: chi2 {chi2} >= {crit}");
    }
    // The coincidences, by contrast, do follow it.
    let sep = exp.side_peak_delay();
    let h0 = build_histogram(&simulate_timetags(&experiment(1.0, 0.0, 120e-12, 2e5), 0.2, 1).unwrap(), 3.0 * sep, TICK).unwrap();
    let hpi = build_histogram(&simulate_timetags(&experiment(1.0, PI, 120e-12, 2e5), 0.2, 1).unwrap(), 3.0 * sep, TICK).unwrap();
    assert!(peak_windows(&h0, sep)[1] > 20.0 * peak_windows(&hpi, sep)[1].max(1.0));
}

#[test]
fn dark_counts_give_flat_histogram() {
    let mut exp = experiment(1.0, 0.0, 120e-12, 0.0);
    exp.detector.dark_rate = 2e5;
    let stream = simulate_timetags(&exp, 2.0, 5).unwrap();
    let hist = build_histogram(&stream, 10e-9, 8.0 * TICK).unwrap();
    assert!(hist.total() > 1000);
    let (chi2, crit) = chi2_constant(&hist.counts);
    assert!(chi2 < crit, "chi2 {chi2} >= {crit}");
    assert!(find_peaks(&hist, 5e-9).unwrap().is_empty());
}

#[test]
fn constant_phase_scan_is_poisson() {
    let mut exp = experiment(0.9, 0.7, 0.0, 1e4);
    exp.cfg.eta = 0.5;
    let scan = simulate_drift_scan(&exp, 0.0, 1.0, 400, 3).unwrap();
    let mean_want = expected_rates(&exp, 0.7).central_peak;
    let counts: Vec<f64> = scan.counts().map(|c| c as f64).collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - mean_want).abs() < 3.0 * (mean_want / n).sqrt());
    // Dispersion index of a Poisson sample: sd of var/mean is about sqrt(2/n).
    assert!((var / mean - 1.0).abs() < 4.0 * (2.0 / n).sqrt(), "{}", var / mean);
}

#[test]
fn long_drift_scan_fits_back_to_true_visibility() {
    let mut exp = experiment(0.93, 0.0, 120e-12, 2e4);
    exp.drift = DriftModel::from_rad_per_min(0.3, 0.4);
    let scan = simulate_drift_scan(&exp, 0.0, 30.0, 200, 12).unwrap();
    let fit = fit_fringe(&scan).unwrap();
    assert!((fit.visibility.v - 0.93).abs() < 0.02, "{}", fit.visibility.v);
}
