use thiserror::Error;

/// Errors raised by the packing laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined spacing: need at least 2 points, got {0}")]
    UndefinedSpacing(usize),

    #[error(
        "threshold too large for cell decomposition: d = {d} >= half side {half_side} (enable the dense fallback)"
    )]
    ThresholdTooLarge { d: f64, half_side: f64 },

    #[error("instance too large: component with {vertices} vertices exceeds the exact budget of {cap}; use the constructive cover")]
    InstanceTooLarge { vertices: usize, cap: usize },

    #[error("exhaustive limit exceeded: {0}")]
    ExhaustiveLimit(String),

    #[error("fully decimated: no points remain after removing the cover")]
    FullyDecimated,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
