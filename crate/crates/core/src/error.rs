use thiserror::Error;

/// Errors raised by the particle scheme and its diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a particle state needs at least 2 positions (N >= 1), got {0}")]
    TooFewParticles(usize),

    #[error("position {index} is not finite")]
    NonFinitePosition { index: usize },

    #[error("positions must be strictly increasing: x[{index}] = {right} <= x[{}] = {left}", index - 1)]
    NotStrictlyIncreasing { index: usize, left: f64, right: f64 },

    #[error("exponent m must be a finite real > 1, got {0}")]
    InvalidExponent(f64),

    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("particle counts differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("density mass is {mass}, expected 1 within 1e-8")]
    MassMismatch { mass: f64 },

    #[error("cumulative distribution cannot bracket level {level} inside [{lo}, {hi}]")]
    Bracketing { level: f64, lo: f64, hi: f64 },

    #[error("density has an interior interval of zero mass near x = {at}")]
    InteriorGap { at: f64 },

    #[error("Z-bar must be negative, got {0}")]
    NonNegativeZbar(f64),

    #[error("step size {step:e} underflowed at t = {t} (minimum {min:e})")]
    StepSizeUnderflow { t: f64, step: f64, min: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("output time {time} is not after the previous time {previous}")]
    OutputTimesNotIncreasing { time: f64, previous: f64 },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("test function does not vanish at the final time (max |phi(T, x)| = {residual:e})")]
    NotCompactlySupported { residual: f64 },

    #[error("cannot parse density spec `{spec}`: {reason}")]
    DensitySpec { spec: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
