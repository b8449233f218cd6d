use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("index {index} out of range for {what} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("gate cannot be compiled: {0}")]
    Uncompilable(String),

    #[error("thresholds are not calibrated")]
    Uncalibrated,

    #[error(
        "thresholds were calibrated for beam amplitude {calibrated}, not {requested}; recalibrate"
    )]
    StaleCalibration { calibrated: f64, requested: f64 },

    #[error("calibration failure on {channel} channel: high level {high:e}, low level {low:e}, separation {separation:e} < {required}")]
    Calibration {
        channel: &'static str,
        high: f64,
        low: f64,
        separation: f64,
        required: f64,
    },

    #[error("fock cutoff {cutoff} too small: tail probability {tail:e} exceeds {limit:e}")]
    InsufficientCutoff {
        cutoff: usize,
        tail: f64,
        limit: f64,
    },

    #[error("malformed grid file line {line}: {reason}")]
    GridFormat { line: usize, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {x}")))
    }
}
