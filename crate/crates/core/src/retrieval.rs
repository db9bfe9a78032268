//! Spectral phase retrieval from a (JSI, JTI) pair of a cw biphoton by
//! alternating projections (Gerchberg-Saxton), and a canonical form that
//! quotients out the ambiguities the two intensities cannot resolve: global
//! phase, a linear phase ramp (a JTI translation) and conjugate reflection
//! `Psi(w) -> conj(Psi(-w))` when `|Psi|` is even.
//!
//! Only global phase and conjugate reflection leave both intensities
//! unchanged; the ramp is quotiented so that states with translated JTIs can
//! be compared. Pointwise phase recovery is not guaranteed unique for every
//! magnitude pair, so the fringe visibility of the retrieved state, which
//! depends on the state only through its JTI, is the reliable figure of merit.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{
    check_dual, jsa_to_jta_cw, jta_to_jsa_cw, Amplitude1D, Axis, FrequencyGrid, Jsi1D, Jti1D,
    SpectralAmplitude1D, TimeGrid,
};
use crate::{Error, Result};

/// Phase is reported only where `|Psi| > SUPPORT_THRESHOLD * max |Psi|`.
pub const SUPPORT_THRESHOLD: f64 = 1e-3;
/// Allowed deviation of either intensity integral from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Largest number of random restarts.
pub const MAX_RESTARTS: usize = 8;

/// Knobs of [`gerchberg_saxton`].
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalOptions {
    /// Iteration budget shared by the first attempt and all restarts.
    pub max_iter: usize,
    /// Target time-domain magnitude residual.
    pub tol: f64,
    /// Starting phase on the frequency grid; zero when `None`.
    pub initial_phase: Option<Vec<f64>>,
    /// Random restarts on stagnation, at most [`MAX_RESTARTS`].
    pub restarts: usize,
    /// Seed for the restart phases.
    pub seed: u64,
    /// Stagnation means the best residual improved by less than
    /// `stagnation_tol` over `stagnation_window` iterations.
    pub stagnation_window: usize,
    pub stagnation_tol: f64,
}

impl Default for RetrievalOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-6,
            initial_phase: None,
            restarts: MAX_RESTARTS,
            seed: 0,
            stagnation_window: 50,
            stagnation_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    /// Target magnitude with the retrieved phase.
    pub state: SpectralAmplitude1D,
    /// Phase in `(-pi, pi]` on the support, `None` elsewhere.
    pub phase: Vec<Option<f64>>,
    /// L2 distance between achieved and target `|psi(t)|`.
    pub magnitude_residual: f64,
    /// Iterations spent over all attempts.
    pub iterations: usize,
    pub converged: bool,
    /// Random restarts used.
    pub restarts: usize,
}

impl RetrievalResult {
    /// Wraps a known state, e.g. for canonicalization. The residual is zero
    /// by construction.
    pub fn from_state(state: SpectralAmplitude1D) -> Self {
        let phase = support_phase(&state);
        Self {
            state,
            phase,
            magnitude_residual: 0.0,
            iterations: 0,
            converged: true,
            restarts: 0,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.state.grid()
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.state.magnitude()
    }
}

fn wrap(x: f64) -> f64 {
    let y = x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor();
    // Map the left endpoint onto the right one so +-pi compare equal.
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

fn support_phase(state: &SpectralAmplitude1D) -> Vec<Option<f64>> {
    let max = state.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    state
        .values()
        .iter()
        .map(|v| (v.norm() > SUPPORT_THRESHOLD * max).then(|| wrap(v.arg())))
        .collect()
}

fn check_normalized(integral: f64) -> Result<()> {
    if integral == 0.0 {
        return Err(Error::ZeroNorm);
    }
    if (integral - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized(integral));
    }
    Ok(())
}

struct Problem<'a> {
    freq: FrequencyGrid,
    time: TimeGrid,
    mag_f: &'a [f64],
    mag_t: &'a [f64],
}

impl Problem<'_> {
    fn with_phase(&self, phase: impl Fn(usize) -> f64) -> Vec<Complex64> {
        self.mag_f
            .iter()
            .enumerate()
            .map(|(k, &m)| Complex64::from_polar(m, phase(k)))
            .collect()
    }

    fn residual(&self, jta: &[Complex64]) -> f64 {
        let sum: f64 = jta
            .iter()
            .zip(self.mag_t)
            .map(|(v, m)| (v.norm() - m).powi(2))
            .sum();
        (sum * self.time.d_t()).sqrt()
    }

    fn forward(&self, jsa: Vec<Complex64>) -> Vec<Complex64> {
        let a = Amplitude1D::new(self.freq, jsa).expect("grid length");
        jsa_to_jta_cw(&a, &self.time).expect("dual grids").into_values()
    }

    fn backward(&self, jta: Vec<Complex64>) -> Vec<Complex64> {
        let a = Amplitude1D::new(self.time, jta).expect("grid length");
        jta_to_jsa_cw(&a, &self.freq).expect("dual grids").into_values()
    }
}

fn impose(values: &mut [Complex64], mag: &[f64]) {
    for (v, &m) in values.iter_mut().zip(mag) {
        let r = v.norm();
        *v = if r > 0.0 { *v * (m / r) } else { Complex64::new(m, 0.0) };
    }
}

/// Smooth random starting phase: a cubic polynomial in `w / w_rms` with
/// coefficients uniform in `[-pi, pi]`.
fn random_phase(problem: &Problem<'_>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (k, m) in problem.mag_f.iter().enumerate() {
        let w = problem.freq.point(k);
        let p = m * m;
        m0 += p;
        m1 += p * w;
        m2 += p * w * w;
    }
    let mean = m1 / m0;
    let rms = (m2 / m0 - mean * mean).max(0.0).sqrt().max(problem.freq.d_omega());
    let c: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-PI..PI));
    (0..problem.mag_f.len())
        .map(|k| {
            let x = (problem.freq.point(k) - mean) / rms;
            c[0] * x + c[1] * x * x + c[2] * x * x * x
        })
        .collect()
}

/// Recovers the spectral phase of a cw biphoton from its JSI and JTI.
///
/// Each iteration imposes `|Psi|` in frequency, transforms, imposes `|psi|`
/// in time and transforms back. The residual is the L2 distance between the
/// achieved and target `|psi|`. The first attempt starts from
/// `options.initial_phase` (zero by default); on stagnation up to
/// `options.restarts` attempts follow from seeded smooth random phases. The
/// best state seen is returned, so the final residual never exceeds the
/// residual of the starting point.
pub fn gerchberg_saxton(jsi: &Jsi1D, jti: &Jti1D, options: &RetrievalOptions) -> Result<RetrievalResult> {
    let freq = *jsi.grid();
    let time = *jti.grid();
    check_dual(&freq, &time)?;
    check_normalized(jsi.integral())?;
    check_normalized(jti.integral())?;
    if let Some(p) = &options.initial_phase {
        if p.len() != freq.len() {
            return Err(Error::LengthMismatch {
                expected: freq.len(),
                got: p.len(),
            });
        }
    }
    crate::error::non_negative("tol", options.tol)?;
    let mag_f = jsi.magnitude();
    let mag_t = jti.magnitude();
    let problem = Problem {
        freq,
        time,
        mag_f: &mag_f,
        mag_t: &mag_t,
    };
    let restarts = options.restarts.min(MAX_RESTARTS);
    let window = options.stagnation_window.max(1);

    let mut jsa = match &options.initial_phase {
        Some(p) => problem.with_phase(|k| p[k]),
        None => problem.with_phase(|_| 0.0),
    };
    let mut jta = problem.forward(jsa.clone());
    let mut best_residual = problem.residual(&jta);
    let mut best = jsa.clone();
    let mut iterations = 0;
    let mut used_restarts = 0;
    // Best residual of the current attempt, sampled every `window` iterations.
    let mut attempt_best = best_residual;
    let mut checkpoint = attempt_best;
    let mut since_checkpoint = 0;

    while best_residual > options.tol && iterations < options.max_iter {
        impose(&mut jta, &mag_t);
        jsa = problem.backward(jta);
        impose(&mut jsa, &mag_f);
        jta = problem.forward(jsa.clone());
        iterations += 1;
        let r = problem.residual(&jta);
        if r < best_residual {
            best_residual = r;
            best.clone_from(&jsa);
        }
        attempt_best = attempt_best.min(r);
        since_checkpoint += 1;
        if since_checkpoint == window {
            let stagnated = checkpoint - attempt_best < options.stagnation_tol;
            if stagnated && used_restarts < restarts && best_residual > options.tol {
                used_restarts += 1;
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                rng.set_stream(used_restarts as u64);
                let phase = random_phase(&problem, &mut rng);
                jsa = problem.with_phase(|k| phase[k]);
                jta = problem.forward(jsa.clone());
                attempt_best = problem.residual(&jta);
                if attempt_best < best_residual {
                    best_residual = attempt_best;
                    best.clone_from(&jsa);
                }
            }
            checkpoint = attempt_best;
            since_checkpoint = 0;
        }
    }

    let state = Amplitude1D::new(freq, best)?;
    Ok(RetrievalResult {
        phase: support_phase(&state),
        state,
        magnitude_residual: best_residual,
        iterations,
        converged: best_residual <= options.tol,
        restarts: used_restarts,
    })
}

/// Circular JTI centroid `arg(sum conj(Psi_k) Psi_(k+1)) / dw`. A ramp
/// `exp(-i w s)` moves it by exactly `-s`, and it vanishes for real even states.
fn time_centroid(values: &[Complex64], freq: &FrequencyGrid) -> f64 {
    let c: Complex64 = values.windows(2).map(|w| w[0].conj() * w[1]).sum();
    if c.norm() > 0.0 {
        c.arg() / freq.d_omega()
    } else {
        0.0
    }
}

/// Index of the support point nearest to `w = 0`.
fn reference_index(values: &[Complex64], freq: &FrequencyGrid) -> Option<usize> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    (0..values.len())
        .filter(|&k| values[k].norm() > SUPPORT_THRESHOLD * max)
        .min_by(|&a, &b| freq.point(a).abs().total_cmp(&freq.point(b).abs()).then(a.cmp(&b)))
}

fn remove_global_phase(values: &mut [Complex64], freq: &FrequencyGrid) {
    if let Some(k) = reference_index(values, freq) {
        let rot = Complex64::from_polar(1.0, -values[k].arg());
        values.iter_mut().for_each(|v| *v *= rot);
    }
}

/// Index of `-w_k` on a grid centered on zero (index 0 has no partner).
fn mirror(k: usize, n: usize) -> Option<usize> {
    (k > 0).then(|| n - k)
}

fn even_magnitude(values: &[Complex64]) -> bool {
    let n = values.len();
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    (0..n).all(|k| match mirror(k, n) {
        Some(j) => (values[k].norm() - values[j].norm()).abs() <= 1e-6 * max,
        None => values[k].norm() <= SUPPORT_THRESHOLD * max,
    })
}

/// Puts a state in the canonical form of its ambiguity class:
///
/// 1. a linear phase ramp moves the circular JTI centroid to `t = 0`;
/// 2. when `|Psi|` is even on a zero-centered grid, `Psi` and
///    `conj(Psi(-w))` are indistinguishable. The representative kept is the
///    one whose even phase part `theta(w) + theta(-w)`, weighted by
///    `|Psi(w) Psi(-w)|`, has non-positive mean sine. For a quadratic phase
///    this is the branch with non-negative slope at the lower band edge;
/// 3. the phase at the support point nearest `w = 0` is set to zero.
///
/// Idempotent up to rounding. The residual and iteration counters are kept.
pub fn canonicalize(result: &RetrievalResult) -> RetrievalResult {
    let freq = *result.grid();
    let mut values = result.state.values().to_vec();

    let t_c = time_centroid(&values, &freq);
    for (k, v) in values.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, -freq.point(k) * t_c);
    }

    remove_global_phase(&mut values, &freq);
    let n = values.len();
    if freq.center().abs() <= 1e-9 * freq.d_omega() && even_magnitude(&values) {
        let even: f64 = (1..n)
            .map(|k| (values[k] * values[n - k]).im)
            .sum();
        let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        if even > 1e-9 * total {
            let reflected: Vec<Complex64> = (0..n)
                .map(|k| mirror(k, n).map_or(values[k].conj(), |j| values[j].conj()))
                .collect();
            values = reflected;
            remove_global_phase(&mut values, &freq);
        }
    }

    let state = Amplitude1D::new(freq, values).expect("same grid");
    RetrievalResult {
        phase: support_phase(&state),
        state,
        ..result.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_dual_grids;
    use crate::interferometer::cfi_visibility_cw;
    use crate::states::{flat_top_jsa, gaussian_cw_jsa, FlatTopPhaseParams};
    use crate::units::hz_to_rad;

    fn gaussian_with_phase(c: [f64; 3]) -> SpectralAmplitude1D {
        let (freq, _) = make_dual_grids(1024, hz_to_rad(1.6e12)).unwrap();
        let sigma = 1.0 / hz_to_rad(100e9);
        let g = gaussian_cw_jsa(sigma, &freq).unwrap();
        let scale = hz_to_rad(100e9);
        let values = g
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let x = freq.point(k) / scale;
                *v * Complex64::from_polar(1.0, c[0] * x + c[1] * x * x + c[2] * x * x * x)
            })
            .collect();
        Amplitude1D::new(freq, values).unwrap()
    }

    fn intensities(state: &SpectralAmplitude1D) -> (Jsi1D, Jti1D) {
        let jta = jsa_to_jta_cw(state, &state.grid().dual()).unwrap();
        (state.intensity(), jta.intensity())
    }

    fn max_phase_gap(a: &RetrievalResult, b: &RetrievalResult) -> f64 {
        a.phase
            .iter()
            .zip(&b.phase)
            .filter_map(|(x, y)| Some(wrap(x.as_ref()? - y.as_ref()?).abs()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn true_phase_is_a_fixed_point() {
        let state = gaussian_with_phase([0.3, 0.8, -0.2]);
        let (jsi, jti) = intensities(&state);
        let phase = state.values().iter().map(|v| v.arg()).collect();
        let opts = RetrievalOptions {
            initial_phase: Some(phase),
            max_iter: 5,
            tol: 0.0,
            ..Default::default()
        };
        let r = gerchberg_saxton(&jsi, &jti, &opts).unwrap();
        assert!(r.magnitude_residual < 1e-6, "{}", r.magnitude_residual);
    }

    #[test]
    fn zero_phase_flat_top_recovers_constant_phase() {
        let (freq, _) = make_dual_grids(1024, hz_to_rad(409.6e9)).unwrap();
        let state = flat_top_jsa(&FlatTopPhaseParams::demonstration(0.0), &freq, hz_to_rad(15.65e9)).unwrap();
        let (jsi, jti) = intensities(&state);
        let r = canonicalize(&gerchberg_saxton(&jsi, &jti, &RetrievalOptions::default()).unwrap());
        let worst = r.phase.iter().flatten().fold(0.0f64, |m, p| m.max(p.abs()));
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn final_residual_never_exceeds_initial() {
        let state = gaussian_with_phase([0.0, 2.5, 1.5]);
        let (jsi, jti) = intensities(&state);
        let start = {
            let p = Problem {
                freq: *jsi.grid(),
                time: *jti.grid(),
                mag_f: &jsi.magnitude(),
                mag_t: &jti.magnitude(),
            };
            p.residual(&p.forward(p.with_phase(|_| 0.0)))
        };
        let opts = RetrievalOptions {
            max_iter: 30,
            ..Default::default()
        };
        let r = gerchberg_saxton(&jsi, &jti, &opts).unwrap();
        assert!(r.magnitude_residual <= start);
        assert_eq!(r.iterations, 30);
    }

    #[test]
    fn input_errors() {
        let state = gaussian_with_phase([0.0; 3]);
        let (jsi, jti) = intensities(&state);
        let scaled = Jsi1D::new(*jsi.grid(), jsi.values().iter().map(|v| 2.0 * v).collect()).unwrap();
        assert!(matches!(
            gerchberg_saxton(&scaled, &jti, &RetrievalOptions::default()),
            Err(Error::NotNormalized(_))
        ));
        let zero = Jsi1D::new(*jsi.grid(), alloc::vec![0.0; 1024]).unwrap();
        assert!(matches!(gerchberg_saxton(&zero, &jti, &RetrievalOptions::default()), Err(Error::ZeroNorm)));
        let other = TimeGrid::new(1024, 2.0 * jti.grid().d_t(), 0.0).unwrap();
        let jti2 = Jti1D::new(other, jti.values().to_vec()).unwrap();
        assert!(gerchberg_saxton(&jsi, &jti2, &RetrievalOptions::default()).is_err());
    }

    #[test]
    fn canonical_form_quotients_ambiguities() {
        let base = RetrievalResult::from_state(gaussian_with_phase([0.0, 0.9, 0.4]));
        let canon = canonicalize(&base);
        let freq = *base.grid();

        let global = RetrievalResult::from_state(base.state.clone().with_global_phase(1.3));
        assert!(max_phase_gap(&canonicalize(&global), &canon) < 1e-9);

        let tau = 0.37 * freq.dual().d_t();
        let ramp = Amplitude1D::new(
            freq,
            base.state
                .values()
                .iter()
                .zip(freq.points())
                .map(|(v, w)| *v * Complex64::from_polar(1.0, w * tau))
                .collect(),
        )
        .unwrap();
        assert!(max_phase_gap(&canonicalize(&RetrievalResult::from_state(ramp)), &canon) < 1e-7);

        let n = freq.len();
        let values = base.state.values();
        let reflected: Vec<Complex64> = (0..n).map(|k| if k == 0 { values[0].conj() } else { values[n - k].conj() }).collect();
        let reflected = RetrievalResult::from_state(Amplitude1D::new(freq, reflected).unwrap());
        assert!(max_phase_gap(&canonicalize(&reflected), &canon) < 1e-9);

        assert!(max_phase_gap(&canonicalize(&canon), &canon) < 1e-9);
        // Quadratic phase: the kept branch has non-negative slope at the lower edge.
        let first = canon.phase.iter().position(Option::is_some).unwrap();
        let slope = wrap(canon.phase[first + 1].unwrap() - canon.phase[first].unwrap());
        assert!(slope >= 0.0, "{slope}");
    }

    #[test]
    fn visibility_is_blind_to_true_ambiguities() {
        // Global phase and conjugate reflection keep both intensities; a
        // ramp does not (it translates the JTI), and the fringe at phi_T = 0
        // is not translation invariant.
        let state = gaussian_with_phase([0.2, 0.9, 0.4]);
        let n = state.values().len();
        let v = state.values();
        let reflected: Vec<Complex64> = (0..n).map(|k| if k == 0 { v[0].conj() } else { v[n - k].conj() }).collect();
        let reflected = Amplitude1D::new(*state.grid(), reflected).unwrap().with_global_phase(2.1);
        for f in [5e9, 15.65e9, 30e9] {
            let vis = |s: &SpectralAmplitude1D| {
                cfi_visibility_cw(&jsa_to_jta_cw(s, &s.grid().dual()).unwrap().intensity(), hz_to_rad(f)).unwrap()
            };
            assert!((vis(&state) - vis(&reflected)).abs() < 1e-12);
        }
    }
}
