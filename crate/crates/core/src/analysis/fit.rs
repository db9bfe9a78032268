#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use alloc::vec::Vec;

use crate::sim::{FringeScan, ScanPoint};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MinMax,
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    pub v: f64,
    /// One standard deviation.
    pub sigma_v: f64,
    pub method: Method,
}

/// Weighted least-squares fit of `A [1 + V cos(phi_t + phase_offset)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub amplitude: f64,
    pub visibility: VisibilityEstimate,
    pub phase_offset: f64,
    /// Covariance of `(A, V, phase_offset)`.
    pub covariance: [[f64; 3]; 3],
    pub chi2: f64,
    pub dof: usize,
    /// Set when the unconstrained estimate exceeded 1 and was clamped.
    pub clamped: bool,
}

impl FringeFit {
    pub fn amplitude_sigma(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }

    pub fn phase_sigma(&self) -> f64 {
        self.covariance[2][2].max(0.0).sqrt()
    }
}

fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(det.abs() > 1e-12 * scale * scale * scale) {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    Some(inv)
}

/// Smallest arc containing all phases, modulo 2 pi, is at least pi.
fn phase_coverage(phases: &mut [f64]) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    for p in phases.iter_mut() {
        *p -= tau * (*p / tau).floor();
    }
    phases.sort_by(f64::total_cmp);
    let mut gap = phases[0] + tau - phases[phases.len() - 1];
    for w in phases.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    tau - gap
}

const REWEIGHT_PASSES: usize = 3;

fn weighted_solve(pts: &[ScanPoint], weights: &[f64]) -> Result<([[f64; 3]; 3], [f64; 3])> {
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (p, &w) in pts.iter().zip(weights) {
        let x = [1.0, p.phi_t.cos(), p.phi_t.sin()];
        let y = p.coincidences as f64;
        for i in 0..3 {
            rhs[i] += w * x[i] * y;
            for j in 0..3 {
                normal[i][j] += w * x[i] * x[j];
            }
        }
    }
    let cov = invert3(normal).ok_or(Error::Degenerate("singular design matrix"))?;
    let beta = core::array::from_fn(|i| (0..3).map(|j| cov[i][j] * rhs[j]).sum());
    Ok((cov, beta))
}

/// Fits `A + a cos(phi) + b sin(phi)` with weights `1 / max(count, 1)`,
/// refines the weights from the fitted model, then converts to `A`,
/// `V = sqrt(a^2 + b^2) / A` and `phase_offset = atan2(-b, a)`.
pub fn fit_fringe(scan: &FringeScan) -> Result<FringeFit> {
    let pts = &scan.points;
    if pts.len() < 5 {
        return Err(Error::Invalid(alloc::format!("fringe fit needs at least 5 points, got {}", pts.len())));
    }
    let mut phases: Vec<f64> = pts.iter().map(|p| p.phi_t).collect();
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::Invalid("non-finite phase in scan".into()));
    }
    let first = phases[0];
    if phases.iter().all(|&p| p == first) {
        return Err(Error::Degenerate("all scan phases are equal"));
    }
    let coverage = phase_coverage(&mut phases);
    if coverage < core::f64::consts::PI - 1e-9 {
        return Err(Error::Invalid(alloc::format!("scan covers {coverage:.3} rad of phase, need at least pi")));
    }

    // First pass weights by the observed counts; later passes weight by the
    // fitted model, which removes the downward pull of low-count points.
    let mut weights: Vec<f64> = pts.iter().map(|p| 1.0 / (p.coincidences as f64).max(1.0)).collect();
    let mut solution = None;
    for _ in 0..=REWEIGHT_PASSES {
        let (cov, beta) = weighted_solve(pts, &weights)?;
        for (w, p) in weights.iter_mut().zip(pts) {
            let model = beta[0] + beta[1] * p.phi_t.cos() + beta[2] * p.phi_t.sin();
            *w = 1.0 / model.max(1.0);
        }
        solution = Some((cov, beta));
    }
    let (cov, beta) = solution.expect("at least one pass");
    let (amp, a, b) = (beta[0], beta[1], beta[2]);
    if !(amp > 0.0) {
        return Err(Error::Degenerate("fitted mean count is not positive"));
    }

    let chi2 = pts
        .iter()
        .map(|p| {
            let y = p.coincidences as f64;
            let m = amp + a * p.phi_t.cos() + b * p.phi_t.sin();
            let r = y - m;
            r * r / m.max(1.0)
        })
        .sum();

    let r = a.hypot(b);
    let raw_v = r / amp;
    let phase_offset = (-b).atan2(a);
    let cov_out = if r > 1e-12 * amp {
        let jac = [
            [1.0, 0.0, 0.0],
            [-r / (amp * amp), a / (r * amp), b / (r * amp)],
            [0.0, b / (r * r), -a / (r * r)],
        ];
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3)
                    .flat_map(|k| (0..3).map(move |l| (k, l)))
                    .map(|(k, l)| jac[i][k] * cov[k][l] * jac[j][l])
                    .sum();
            }
        }
        out
    } else {
        // At r = 0 the phase is undefined; V inherits the mean cos/sin variance.
        let var_v = 0.5 * (cov[1][1] + cov[2][2]) / (amp * amp);
        [[cov[0][0], 0.0, 0.0], [0.0, var_v, 0.0], [0.0, 0.0, f64::INFINITY]]
    };
    let clamped = raw_v > 1.0;
    Ok(FringeFit {
        amplitude: amp,
        visibility: VisibilityEstimate {
            v: raw_v.min(1.0),
            sigma_v: cov_out[1][1].max(0.0).sqrt(),
            method: Method::Fit,
        },
        phase_offset,
        covariance: cov_out,
        chi2,
        dof: pts.len() - 3,
        clamped,
    })
}

/// `V = (max - min) / (max + min)` with Poisson error propagation.
pub fn visibility_minmax(max_count: f64, min_count: f64) -> Result<VisibilityEstimate> {
    crate::error::non_negative("min_count", min_count)?;
    if !(max_count >= min_count) || !max_count.is_finite() {
        return Err(Error::Invalid(alloc::format!("need max >= min, got max {max_count}, min {min_count}")));
    }
    if max_count == 0.0 {
        return Err(Error::Degenerate("max and min counts are both zero"));
    }
    let s = max_count + min_count;
    Ok(VisibilityEstimate {
        v: (max_count - min_count) / s,
        sigma_v: 2.0 * (max_count * min_count * min_count + min_count * max_count * max_count).sqrt() / (s * s),
        method: Method::MinMax,
    })
}

pub fn visibility_minmax_scan(scan: &FringeScan) -> Result<VisibilityEstimate> {
    match (scan.max_count(), scan.min_count()) {
        (Some(max), Some(min)) => visibility_minmax(max as f64, min as f64),
        _ => Err(Error::Invalid("empty scan".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ScanSource;
    use core::f64::consts::PI;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Poisson};

    fn scan(n: usize, mut f: impl FnMut(f64) -> u64) -> FringeScan {
        let points: Vec<ScanPoint> = (0..n)
            .map(|k| {
                let phi_t = 2.0 * PI * k as f64 / n as f64;
                ScanPoint {
                    phi_t,
                    coincidences: f(phi_t),
                    integration: 1.0,
                }
            })
            .collect();
        FringeScan {
            points,
            source: ScanSource::Pzt,
        }
    }

    #[test]
    fn minmax_examples() {
        let e = visibility_minmax(200.0, 0.0).unwrap();
        assert_eq!((e.v, e.sigma_v), (1.0, 0.0));
        assert_eq!(visibility_minmax(50.0, 50.0).unwrap().v, 0.0);
        assert!(visibility_minmax(0.0, 0.0).is_err());
        assert!(visibility_minmax(1.0, 2.0).is_err());
        // Direct propagation: dV/dmax = 2 min / s^2, dV/dmin = -2 max / s^2.
        let e = visibility_minmax(300.0, 20.0).unwrap();
        let direct = ((2.0 * 20.0 / 320f64.powi(2)).powi(2) * 300.0 + (2.0 * 300.0 / 320f64.powi(2)).powi(2) * 20.0).sqrt();
        assert!((e.sigma_v - direct).abs() < 1e-15);
    }

    #[test]
    fn exact_recovery() {
        // Counts are integers, so a large amplitude keeps rounding far below 1e-6.
        let amp = 1e9;
        let s = scan(50, |p| (amp * (1.0 + 0.93 * (p + 0.4).cos())).round() as u64);
        let fit = fit_fringe(&s).unwrap();
        assert!((fit.visibility.v - 0.93).abs() < 1e-6, "{}", fit.visibility.v);
        assert!((fit.phase_offset - 0.4).abs() < 1e-6);
        assert!((fit.amplitude / amp - 1.0).abs() < 1e-6);
        assert!(!fit.clamped);
    }

    #[test]
    fn poisson_noise_within_two_sigma() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = scan(40, |p| Poisson::new(100.0 * (1.0 + 0.93 * p.cos())).unwrap().sample(&mut rng) as u64);
        let fit = fit_fringe(&s).unwrap();
        let v = fit.visibility;
        assert!((v.v - 0.93).abs() < 2.0 * v.sigma_v, "{} +- {}", v.v, v.sigma_v);
        assert!(v.sigma_v > 0.005 && v.sigma_v < 0.05);
        let mm = visibility_minmax_scan(&s).unwrap();
        let mutual = (mm.sigma_v.powi(2) + v.sigma_v.powi(2)).sqrt();
        assert!((mm.v - v.v).abs() < 2.0 * mutual, "{} vs {}", mm.v, v.v);
    }

    #[test]
    fn fit_is_unbiased_over_many_scans() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 300;
        let vs: Vec<f64> = (0..n)
            .map(|_| {
                let s = scan(40, |p| Poisson::new(100.0 * (1.0 + 0.93 * (p - 1.0).cos())).unwrap().sample(&mut rng) as u64);
                fit_fringe(&s).unwrap().visibility.v
            })
            .collect();
        let mean = vs.iter().sum::<f64>() / n as f64;
        let sd = (vs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((mean - 0.93).abs() < 3.0 * sd / (n as f64).sqrt(), "mean {mean} sd {sd}");
    }

    #[test]
    fn flat_fringe_consistent_with_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s = scan(40, |_| Poisson::new(200.0).unwrap().sample(&mut rng) as u64);
        let v = fit_fringe(&s).unwrap().visibility;
        assert!(v.v.abs() < 2.0 * v.sigma_v, "{} +- {}", v.v, v.sigma_v);
    }

    #[test]
    fn degenerate_inputs() {
        let mut s = scan(10, |_| 10);
        for p in &mut s.points {
            p.phi_t = 1.0;
        }
        assert!(matches!(fit_fringe(&s), Err(Error::Degenerate(_))));
        let short = scan(4, |_| 10);
        assert!(fit_fringe(&short).is_err());
        let mut narrow = scan(10, |_| 10);
        for (k, p) in narrow.points.iter_mut().enumerate() {
            p.phi_t = 0.1 * k as f64;
        }
        assert!(fit_fringe(&narrow).is_err());
    }
}
