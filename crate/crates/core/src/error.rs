use thiserror::Error;

/// Errors raised by grid construction, the measurement models and the
/// bound/repeatability analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid range: x_max ({x_max}) must exceed x_min ({x_min})")]
    InvalidRange { x_min: f64, x_max: f64 },

    #[error("sample count {0} is not a power of two >= 8")]
    NotPowerOfTwo(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state support [{lo}, {hi}] exceeds grid [{x_min}, {x_max}]")]
    SupportExceedsGrid {
        lo: f64,
        hi: f64,
        x_min: f64,
        x_max: f64,
    },

    #[error("boundary leakage: relative amplitude {relative:e} in the outer grid cells")]
    BoundaryLeakage { relative: f64 },

    #[error("leakage: {0}")]
    Leakage(String),

    #[error("confidence parameter eps = {0} is outside (0, 1)")]
    InvalidEps(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("input not normalized: mass {0}")]
    NonNormalized(f64),

    #[error("coupling lambda = {0} is too small for the outcome scaling")]
    LambdaTooSmall(f64),

    #[error("conditioning event has negligible mass {0:e}")]
    NullConditioningEvent(f64),

    #[error("no finite repeatability width inside the window")]
    NoFiniteDelta,

    #[error("probe is not compactly supported")]
    NonCompactProbe,

    #[error("joint density mass deficit: mass {0}")]
    MassDeficit(f64),

    #[error("grid inadequate: {0}")]
    GridInadequate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
