//! Unit conversions. User-facing quantities are in Hz and seconds; everything
//! inside the kernels is rad/s.

use core::f64::consts::PI;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn rad_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Group-velocity dispersion coefficient `beta2 = D lambda^2 / (2 pi c)` in s^2
/// from a dispersion parameter in ns/nm and a center wavelength in nm.
pub fn beta2_from_dispersion(d_ns_per_nm: f64, wavelength_nm: f64) -> f64 {
    let d = d_ns_per_nm; // ns/nm == s/m
    let lambda = wavelength_nm * 1e-9;
    d * lambda * lambda / (2.0 * PI * SPEED_OF_LIGHT)
}

/// Power transmission of a loss given in dB.
pub fn db_to_transmission(loss_db: f64) -> f64 {
    libm::pow(10.0, -loss_db / 10.0)
}
