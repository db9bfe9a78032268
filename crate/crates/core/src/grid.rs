//! Uniform grids, amplitude containers and the normalized Fourier transforms
//! between the spectral and temporal representations of a biphoton.
//!
//! Grid points are `x_k = center + (k - n/2) * spacing` for `k = 0..n`, so the
//! grid is symmetric about `center` except for the extra point on the negative
//! side. A frequency grid and a time grid are Fourier duals when they have the
//! same size and `d_omega * d_t * n = 2 pi`.
//!
//! Transform conventions (all integrals are midpoint Riemann sums):
//!
//! - cw ridge: `psi(t) = (2 pi)^(-1/2) sum_w Psi(w) exp(-i w t) dw`, where `t`
//!   is the signal-idler delay `t_S - t_I`. The kernel carries the full
//!   detuning `w` because a ridge state `|w0_S + w>|w0_I - w>` accumulates
//!   `exp(-i w t_S) exp(+i w t_I)`. With this kernel a shift of the spectrum
//!   by `dW` is exactly a modulation `exp(i dW t)` of the temporal amplitude,
//!   which is what ties the time- and frequency-domain visibilities together.
//! - pulsed 2-D: `psi(t_S, t_I) = (2 pi)^-1 sum Psi(w_S, w_I)
//!   exp(-i (w_S t_S - w_I t_I)) dw_S dw_I`, optionally multiplied by the
//!   carrier `exp(-i (w_S0 t_S + w_I0 t_I))`. Note the sign on the idler term:
//!   the idler detuning enters the state as `w_I0 - w_I`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::fft::{Direction, Radix2};
use crate::{Error, Result};

const DUAL_TOLERANCE: f64 = 1e-9;

/// Common behaviour of the two uniform grid types.
pub trait Axis: Copy + core::fmt::Debug {
    fn len(&self) -> usize;
    fn spacing(&self) -> f64;
    fn center(&self) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn point(&self, k: usize) -> f64 {
        self.center() + (k as f64 - (self.len() / 2) as f64) * self.spacing()
    }

    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }

    fn first(&self) -> f64 {
        self.point(0)
    }

    fn last(&self) -> f64 {
        self.point(self.len() - 1)
    }

    /// Index of the grid point nearest to `x`, if `x` lies within half a
    /// spacing of the grid.
    fn nearest_index(&self, x: f64) -> Option<usize> {
        let k = ((x - self.center()) / self.spacing()).round() + (self.len() / 2) as f64;
        if k >= 0.0 && k < self.len() as f64 {
            Some(k as usize)
        } else {
            None
        }
    }
}

fn validate_axis(n: usize, spacing: f64, center: f64, name: &'static str) -> Result<()> {
    if n < 8 {
        return Err(Error::GridTooSmall(n));
    }
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    crate::error::positive(name, spacing)?;
    if !center.is_finite() {
        return Err(Error::Invalid(format!("grid center {center} is not finite")));
    }
    Ok(())
}

/// Uniform grid of frequency detunings in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    n: usize,
    d_omega: f64,
    center: f64,
}

impl FrequencyGrid {
    pub fn new(n: usize, d_omega: f64, center: f64) -> Result<Self> {
        validate_axis(n, d_omega, center, "d_omega")?;
        Ok(Self { n, d_omega, center })
    }

    /// Grid of `n` points spanning `omega_span` rad/s centered on zero.
    pub fn with_span(n: usize, omega_span: f64) -> Result<Self> {
        crate::error::positive("omega_span", omega_span)?;
        Self::new(n, omega_span / n as f64, 0.0)
    }

    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    /// The time grid dual to this one, centered on zero.
    pub fn dual(&self) -> TimeGrid {
        TimeGrid {
            n: self.n,
            d_t: 2.0 * PI / (self.n as f64 * self.d_omega),
            center: 0.0,
        }
    }
}

impl Axis for FrequencyGrid {
    fn len(&self) -> usize {
        self.n
    }
    fn spacing(&self) -> f64 {
        self.d_omega
    }
    fn center(&self) -> f64 {
        self.center
    }
}

/// Uniform grid of times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    n: usize,
    d_t: f64,
    center: f64,
}

impl TimeGrid {
    pub fn new(n: usize, d_t: f64, center: f64) -> Result<Self> {
        validate_axis(n, d_t, center, "d_t")?;
        Ok(Self { n, d_t, center })
    }

    pub fn d_t(&self) -> f64 {
        self.d_t
    }

    /// The frequency grid dual to this one, centered on zero.
    pub fn dual(&self) -> FrequencyGrid {
        FrequencyGrid {
            n: self.n,
            d_omega: 2.0 * PI / (self.n as f64 * self.d_t),
            center: 0.0,
        }
    }
}

impl Axis for TimeGrid {
    fn len(&self) -> usize {
        self.n
    }
    fn spacing(&self) -> f64 {
        self.d_t
    }
    fn center(&self) -> f64 {
        self.center
    }
}

/// Builds a frequency grid of `n` points spanning `omega_span` and its dual
/// time grid (`d_omega * d_t * n = 2 pi`). The time span is `2 pi n / omega_span`.
pub fn make_dual_grids(n: usize, omega_span: f64) -> Result<(FrequencyGrid, TimeGrid)> {
    let f = FrequencyGrid::with_span(n, omega_span)?;
    Ok((f, f.dual()))
}

/// Checks that `f` and `t` are Fourier duals.
pub fn check_dual(f: &FrequencyGrid, t: &TimeGrid) -> Result<()> {
    if f.n != t.n {
        return Err(Error::GridMismatch(format!(
            "{} frequency points vs {} time points",
            f.n, t.n
        )));
    }
    let product = f.d_omega * t.d_t * f.n as f64;
    if ((product - 2.0 * PI) / (2.0 * PI)).abs() > DUAL_TOLERANCE {
        return Err(Error::GridMismatch(format!(
            "d_omega * d_t * n = {product}, expected 2 pi"
        )));
    }
    Ok(())
}

/// Discretized `integral |.|^2` of an amplitude.
pub trait NormL2 {
    fn norm_l2(&self) -> f64;
}

pub fn norm_l2<A: NormL2 + ?Sized>(amplitude: &A) -> f64 {
    amplitude.norm_l2()
}

/// Complex amplitude sampled on a 1-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude1D<G> {
    grid: G,
    values: Vec<Complex64>,
}

/// Joint spectral amplitude of a cw biphoton along its frequency ridge.
pub type SpectralAmplitude1D = Amplitude1D<FrequencyGrid>;
/// Joint temporal amplitude of a cw biphoton as a function of `t_S - t_I`.
pub type TemporalAmplitude1D = Amplitude1D<TimeGrid>;

impl<G: Axis> Amplitude1D<G> {
    /// Wraps samples without rescaling them.
    pub fn new(grid: G, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Wraps samples and rescales them to unit norm. Returns the amplitude
    /// together with the norm the samples had before rescaling.
    pub fn normalized(grid: G, values: Vec<Complex64>) -> Result<(Self, f64)> {
        let mut amplitude = Self::new(grid, values)?;
        let raw = amplitude.norm_l2();
        if !(raw > 0.0) || !raw.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / raw.sqrt();
        amplitude.values.iter_mut().for_each(|v| *v *= scale);
        Ok((amplitude, raw))
    }

    pub fn from_fn(grid: G, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `|amplitude|^2`.
    pub fn intensity(&self) -> Intensity1D<G> {
        Intensity1D {
            grid: self.grid,
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Multiplies every sample by `exp(i theta)`.
    pub fn with_global_phase(mut self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        self.values.iter_mut().for_each(|v| *v *= w);
        self
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self
    }
}

impl<G: Axis> NormL2 for Amplitude1D<G> {
    fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }
}

/// Non-negative intensity (JSI or JTI) on a 1-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Intensity1D<G> {
    grid: G,
    values: Vec<f64>,
}

pub type Jsi1D = Intensity1D<FrequencyGrid>;
pub type Jti1D = Intensity1D<TimeGrid>;

impl<G: Axis> Intensity1D<G> {
    pub fn new(grid: G, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Invalid(format!("intensity sample {bad} is negative")));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    /// `sqrt` of every sample, i.e. the magnitude of the underlying amplitude.
    pub fn magnitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.sqrt()).collect()
    }

    /// Copy of the intensity translated by `shift` grid points (samples moved
    /// past the edge are dropped, vacated samples are zero).
    pub fn translated(&self, shift: isize) -> Self {
        let n = self.values.len() as isize;
        let values = (0..n)
            .map(|k| {
                let src = k - shift;
                if (0..n).contains(&src) {
                    self.values[src as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }
}

/// Complex amplitude on a 2-D product grid, stored row-major with the signal
/// index slowest: `values[s * n_i + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude2D<G> {
    grid_s: G,
    grid_i: G,
    values: Vec<Complex64>,
}

pub type JointSpectralAmplitude2D = Amplitude2D<FrequencyGrid>;
pub type JointTemporalAmplitude2D = Amplitude2D<TimeGrid>;

impl<G: Axis> Amplitude2D<G> {
    pub fn new(grid_s: G, grid_i: G, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid_s.len() * grid_i.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(Self {
            grid_s,
            grid_i,
            values,
        })
    }

    pub fn normalized(grid_s: G, grid_i: G, values: Vec<Complex64>) -> Result<(Self, f64)> {
        let mut amplitude = Self::new(grid_s, grid_i, values)?;
        let raw = amplitude.norm_l2();
        if !(raw > 0.0) || !raw.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / raw.sqrt();
        amplitude.values.iter_mut().for_each(|v| *v *= scale);
        Ok((amplitude, raw))
    }

    pub fn from_fn(grid_s: G, grid_i: G, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid_s.len() * grid_i.len());
        for xs in grid_s.points() {
            for xi in grid_i.points() {
                values.push(f(xs, xi));
            }
        }
        Self {
            grid_s,
            grid_i,
            values,
        }
    }

    pub fn grid_s(&self) -> &G {
        &self.grid_s
    }

    pub fn grid_i(&self) -> &G {
        &self.grid_i
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, s: usize, i: usize) -> Complex64 {
        self.values[s * self.grid_i.len() + i]
    }

    pub fn intensity(&self) -> Intensity2D<G> {
        Intensity2D {
            grid_s: self.grid_s,
            grid_i: self.grid_i,
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub fn with_global_phase(mut self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        self.values.iter_mut().for_each(|v| *v *= w);
        self
    }
}

impl<G: Axis> NormL2 for Amplitude2D<G> {
    fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
            * self.grid_s.spacing()
            * self.grid_i.spacing()
    }
}

/// Non-negative intensity on a 2-D product grid (same layout as [`Amplitude2D`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Intensity2D<G> {
    grid_s: G,
    grid_i: G,
    values: Vec<f64>,
}

pub type Jti2D = Intensity2D<TimeGrid>;

impl<G: Axis> Intensity2D<G> {
    pub fn grid_s(&self) -> &G {
        &self.grid_s
    }

    pub fn grid_i(&self) -> &G {
        &self.grid_i
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: usize, i: usize) -> f64 {
        self.values[s * self.grid_i.len() + i]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid_s.spacing() * self.grid_i.spacing()
    }
}

/// Signal and idler carrier frequencies (rad/s). Only the 2-D transforms use
/// them, and only as an overall phase `exp(-i (w_S0 t_S + w_I0 t_I))`, which
/// no intensity depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carrier {
    pub omega_s0: f64,
    pub omega_i0: f64,
}

/// Evaluates `out(y_k) = (2 pi)^(-1/2) sum_j in(x_j) exp(sign i x_j y_k) dx` on
/// a dual grid pair with one FFT. `sign` is -1 or +1.
fn transform_axis(
    input: &[Complex64],
    from: (f64, f64),
    to: (f64, f64),
    sign: f64,
    plan: &Radix2,
) -> Vec<Complex64> {
    let n = input.len();
    let (dx, cx) = from;
    let (dy, cy) = to;
    let half = (n / 2) as f64;
    let mut buf: Vec<Complex64> = input
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let xp = (j as f64 - half) * dx;
            let flip = if j % 2 == 0 { 1.0 } else { -1.0 };
            v * Complex64::from_polar(flip, sign * xp * cy)
        })
        .collect();
    let direction = if sign < 0.0 {
        Direction::Forward
    } else {
        Direction::Inverse
    };
    plan.process(&mut buf, direction);
    // exp(sign i pi n / 2) is 1 for every admissible n (a multiple of 4).
    let scale = dx / (2.0 * PI).sqrt();
    buf.iter_mut().enumerate().for_each(|(k, v)| {
        let yp = (k as f64 - half) * dy;
        let flip = if k % 2 == 0 { 1.0 } else { -1.0 };
        *v *= Complex64::from_polar(scale * flip, sign * (cx * cy + cx * yp));
    });
    buf
}

fn plan_for(n: usize) -> Radix2 {
    Radix2::new(n).expect("grid sizes are validated as powers of two")
}

/// `psi(t) = (2 pi)^(-1/2) sum_w Psi(w) exp(-i w t) dw` on the given dual time grid.
pub fn jsa_to_jta_cw(psi: &SpectralAmplitude1D, time: &TimeGrid) -> Result<TemporalAmplitude1D> {
    check_dual(psi.grid(), time)?;
    let plan = plan_for(time.n);
    let f = psi.grid();
    let values = transform_axis(
        psi.values(),
        (f.d_omega, f.center),
        (time.d_t, time.center),
        -1.0,
        &plan,
    );
    Ok(Amplitude1D {
        grid: *time,
        values,
    })
}

/// Inverse of [`jsa_to_jta_cw`].
pub fn jta_to_jsa_cw(
    psi: &TemporalAmplitude1D,
    freq: &FrequencyGrid,
) -> Result<SpectralAmplitude1D> {
    check_dual(freq, psi.grid())?;
    let plan = plan_for(freq.n);
    let t = psi.grid();
    let values = transform_axis(
        psi.values(),
        (t.d_t, t.center),
        (freq.d_omega, freq.center),
        1.0,
        &plan,
    );
    Ok(Amplitude1D {
        grid: *freq,
        values,
    })
}

fn map_rows(
    values: &mut [Complex64],
    rows: usize,
    cols: usize,
    mut f: impl FnMut(&[Complex64]) -> Vec<Complex64>,
) {
    for r in 0..rows {
        let row = &mut values[r * cols..(r + 1) * cols];
        let out = f(row);
        row.copy_from_slice(&out);
    }
}

fn map_cols(
    values: &mut [Complex64],
    rows: usize,
    cols: usize,
    mut f: impl FnMut(&[Complex64]) -> Vec<Complex64>,
) {
    let mut column = Vec::with_capacity(rows);
    for c in 0..cols {
        column.clear();
        column.extend((0..rows).map(|r| values[r * cols + c]));
        let out = f(&column);
        for (r, v) in out.into_iter().enumerate() {
            values[r * cols + c] = v;
        }
    }
}

/// Pulsed 2-D transform from the joint spectral to the joint temporal amplitude.
pub fn jsa_to_jta_2d(
    psi: &JointSpectralAmplitude2D,
    time_s: &TimeGrid,
    time_i: &TimeGrid,
    carrier: Option<Carrier>,
) -> Result<JointTemporalAmplitude2D> {
    check_dual(psi.grid_s(), time_s)?;
    check_dual(psi.grid_i(), time_i)?;
    let (fs, fi) = (*psi.grid_s(), *psi.grid_i());
    let (rows, cols) = (fs.n, fi.n);
    let mut values = psi.values.clone();
    let plan_i = plan_for(cols);
    map_rows(&mut values, rows, cols, |row| {
        transform_axis(row, (fi.d_omega, fi.center), (time_i.d_t, time_i.center), 1.0, &plan_i)
    });
    let plan_s = plan_for(rows);
    map_cols(&mut values, rows, cols, |col| {
        transform_axis(col, (fs.d_omega, fs.center), (time_s.d_t, time_s.center), -1.0, &plan_s)
    });
    if let Some(c) = carrier {
        apply_carrier(&mut values, time_s, time_i, c, -1.0);
    }
    Ok(Amplitude2D {
        grid_s: *time_s,
        grid_i: *time_i,
        values,
    })
}

/// Inverse of [`jsa_to_jta_2d`]; pass the same carrier that was applied.
pub fn jta_to_jsa_2d(
    psi: &JointTemporalAmplitude2D,
    freq_s: &FrequencyGrid,
    freq_i: &FrequencyGrid,
    carrier: Option<Carrier>,
) -> Result<JointSpectralAmplitude2D> {
    check_dual(freq_s, psi.grid_s())?;
    check_dual(freq_i, psi.grid_i())?;
    let (ts, ti) = (*psi.grid_s(), *psi.grid_i());
    let (rows, cols) = (ts.n, ti.n);
    let mut values = psi.values.clone();
    if let Some(c) = carrier {
        apply_carrier(&mut values, &ts, &ti, c, 1.0);
    }
    let plan_i = plan_for(cols);
    map_rows(&mut values, rows, cols, |row| {
        transform_axis(row, (ti.d_t, ti.center), (freq_i.d_omega, freq_i.center), -1.0, &plan_i)
    });
    let plan_s = plan_for(rows);
    map_cols(&mut values, rows, cols, |col| {
        transform_axis(col, (ts.d_t, ts.center), (freq_s.d_omega, freq_s.center), 1.0, &plan_s)
    });
    Ok(Amplitude2D {
        grid_s: *freq_s,
        grid_i: *freq_i,
        values,
    })
}

fn apply_carrier(values: &mut [Complex64], ts: &TimeGrid, ti: &TimeGrid, c: Carrier, sign: f64) {
    let cols = ti.n;
    for (s, t_s) in ts.points().enumerate() {
        for (i, t_i) in ti.points().enumerate() {
            values[s * cols + i] *= Complex64::from_polar(1.0, sign * (c.omega_s0 * t_s + c.omega_i0 * t_i));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_cw(psi: &SpectralAmplitude1D, t: &TimeGrid) -> Vec<Complex64> {
        t.points()
            .map(|tk| {
                psi.grid()
                    .points()
                    .zip(psi.values())
                    .fold(Complex64::new(0.0, 0.0), |acc, (w, v)| {
                        acc + v * Complex64::from_polar(1.0, -w * tk)
                    })
                    * psi.grid().d_omega()
                    / (2.0 * PI).sqrt()
            })
            .collect()
    }

    #[test]
    fn dual_grid_examples() {
        let (f, t) = make_dual_grids(8, 8.0).unwrap();
        assert_eq!(f.d_omega(), 1.0);
        assert!((t.d_t() - 2.0 * PI / 8.0).abs() < 1e-15);
        assert_eq!(make_dual_grids(7, 8.0).unwrap_err(), Error::GridTooSmall(7));
        assert_eq!(make_dual_grids(12, 8.0).unwrap_err(), Error::NotPowerOfTwo(12));
        assert!(make_dual_grids(8, 0.0).is_err());
        assert!(make_dual_grids(8, -1.0).is_err());

        let span = 2.0 * PI * 640e9;
        let (f, t) = make_dual_grids(1024, span).unwrap();
        assert!((t.d_t() - 2.0 * PI / (1024.0 * f.d_omega())).abs() < 1e-24);
        assert!(1024.0 * t.d_t() >= 2.0 * PI * 1024.0 / span * (1.0 - 1e-12));
    }

    #[test]
    fn grid_points_are_symmetric() {
        let f = FrequencyGrid::new(8, 0.5, 0.0).unwrap();
        let pts: Vec<f64> = f.points().collect();
        assert_eq!(pts, vec![-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]);
        assert_eq!(f.nearest_index(0.26), Some(5));
        assert_eq!(f.nearest_index(5.0), None);
    }

    #[test]
    fn transform_matches_direct_sum_with_offset_centers() {
        let f = FrequencyGrid::new(32, 0.7, 0.3).unwrap();
        let base = f.dual();
        let t = TimeGrid::new(32, base.d_t(), -0.4).unwrap();
        let psi = Amplitude1D::from_fn(f, |w| Complex64::new((-w * w / 8.0).exp(), 0.3 * w));
        let fast = jsa_to_jta_cw(&psi, &t).unwrap();
        for (a, b) in fast.values().iter().zip(naive_cw(&psi, &t)) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
        let back = jta_to_jsa_cw(&fast, &f).unwrap();
        for (a, b) in back.values().iter().zip(psi.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let f = FrequencyGrid::new(16, 1.0, 0.0).unwrap();
        let psi = Amplitude1D::from_fn(f, |_| Complex64::new(1.0, 0.0));
        let wrong = TimeGrid::new(16, 0.1, 0.0).unwrap();
        assert!(matches!(jsa_to_jta_cw(&psi, &wrong), Err(Error::GridMismatch(_))));
        let other_size = TimeGrid::new(32, 2.0 * PI / 32.0, 0.0).unwrap();
        assert!(matches!(jsa_to_jta_cw(&psi, &other_size), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn norm_examples() {
        let f = FrequencyGrid::new(8, 0.5, 0.0).unwrap();
        let zero = Amplitude1D::new(f, vec![Complex64::new(0.0, 0.0); 8]).unwrap();
        assert_eq!(norm_l2(&zero), 0.0);
        assert_eq!(
            Amplitude1D::normalized(f, vec![Complex64::new(0.0, 0.0); 8]).unwrap_err(),
            Error::ZeroNorm
        );
        let (unit, raw) = Amplitude1D::normalized(f, vec![Complex64::new(1.0, 1.0); 8]).unwrap();
        assert!((raw - 8.0).abs() < 1e-12);
        assert!((norm_l2(&unit) - 1.0).abs() < 1e-12);
        let doubled = unit.scaled(Complex64::new(2.0, 0.0));
        assert!((norm_l2(&doubled) - 4.0).abs() < 1e-12);
        assert!(Amplitude1D::new(f, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }
}
