use alloc::string::String;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid needs at least 8 points, got {0}")]
    GridTooSmall(usize),
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("frequency and time grids are not Fourier duals: {0}")]
    GridMismatch(String),
    #[error("amplitude has zero norm")]
    ZeroNorm,
    #[error("intensity is not normalized: integral = {0}")]
    NotNormalized(f64),
    #[error("grid too narrow along the {direction} direction: tail mass {tail_mass:e} exceeds 1e-6")]
    GridTooNarrow {
        direction: &'static str,
        tail_mass: f64,
    },
    #[error("insufficient guard band: {0}")]
    GuardBand(String),
    #[error("sample spacing is not uniform at row {row}")]
    NonUniform { row: usize },
    #[error("degenerate fit: {0}")]
    Degenerate(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { name, value })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, inf)",
        })
    }
}

pub(crate) fn unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
