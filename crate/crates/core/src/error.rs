use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("hermiticity violated (max |a - a^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("not PSD (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("state not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("parameter `{name}` = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: String,
    },
    #[error("unknown {what} `{got}` (expected {expected})")]
    UnknownName {
        what: &'static str,
        got: String,
        expected: &'static str,
    },
    #[error("degenerate basis: r = 1 makes the pair linearly dependent")]
    DegenerateBasis,
    #[error("channel separable-degenerate at r = 1")]
    SeparableDegenerate,
    #[error("epsilon too large for this r (eps = {eps}, bound = {bound})")]
    EpsilonTooLarge { eps: f64, bound: f64 },
    #[error("use teleport_mixed: channel {0} has no pure state vector")]
    NotPure(&'static str),
    #[error("metric `{metric}` is not applicable to channel `{channel}`: {reason}")]
    InapplicableMetric {
        metric: &'static str,
        channel: &'static str,
        reason: String,
    },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("invalid sample count {n}: {reason}")]
    InvalidSampleCount { n: usize, reason: &'static str },
    #[error("threshold not bracketed on [{lo}, {hi}]")]
    ThresholdNotBracketed { lo: f64, hi: f64 },
    #[error("curve not monotone on the scan grid near {0}")]
    NotMonotone(f64),
    #[error("expected exactly one crossing, found {}: {brackets:?}", brackets.len())]
    CrossingCount { brackets: Vec<(f64, f64)> },
}

pub type Result<T> = std::result::Result<T, Error>;
