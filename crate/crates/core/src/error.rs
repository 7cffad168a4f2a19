use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DspError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("sample out of range at index {index}: {value}")]
    OutOfRange { index: usize, value: f64 },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid length: {0}")]
    InvalidLength(String),
    #[error("denominator vanishes at omega = {omega}")]
    DivisionNearZero { omega: f64 },
    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },
    #[error("roots are not closed under conjugation: {0}")]
    NonConjugateRoots(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid factor {0}")]
    InvalidFactor(usize),
    #[error("lag {lag} must be smaller than the signal length {len}")]
    InvalidLag { lag: usize, len: usize },
    #[error("singular recursion at order {order}: prediction error {error}")]
    SingularError { order: usize, error: f64 },
    #[error("invalid cluster count k = {k} for {n_points} points")]
    InvalidK { k: usize, n_points: usize },
    #[error("empty data")]
    EmptyData,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("signal has zero norm")]
    ZeroSignal,
    #[error("signal of length {len} does not fit in {capacity} amplitudes")]
    TooLong { len: usize, capacity: usize },
    #[error("invalid qubit count {0} (supported: 1..=14)")]
    InvalidQubits(usize),
    #[error("invalid shot count {0}")]
    InvalidShots(usize),
    #[error("reference signal has zero energy")]
    ZeroReference,
    #[error("filter is unstable: largest pole magnitude {max_pole_magnitude}")]
    UnstableFilter { max_pole_magnitude: f64 },
}

impl DspError {
    /// Stable identifier used by the CLI and HTTP layers.
    pub fn code(&self) -> &'static str {
        match self {
            DspError::InvalidSpec(_) => "InvalidSpec",
            DspError::UnsupportedFormat(_) => "UnsupportedFormat",
            DspError::CorruptHeader(_) => "CorruptHeader",
            DspError::OutOfRange { .. } => "OutOfRange",
            DspError::LengthMismatch { .. } => "LengthMismatch",
            DspError::InvalidLength(_) => "InvalidLength",
            DspError::DivisionNearZero { .. } => "DivisionNearZero",
            DspError::NoConvergence { .. } => "NoConvergence",
            DspError::NonConjugateRoots(_) => "NonConjugateRoots",
            DspError::NumericalFailure(_) => "NumericalFailure",
            DspError::NotPowerOfTwo(_) => "NotPowerOfTwo",
            DspError::EmptyInput => "EmptyInput",
            DspError::InvalidFactor(_) => "InvalidFactor",
            DspError::InvalidLag { .. } => "InvalidLag",
            DspError::SingularError { .. } => "SingularError",
            DspError::InvalidK { .. } => "InvalidK",
            DspError::EmptyData => "EmptyData",
            DspError::DimensionMismatch { .. } => "DimensionMismatch",
            DspError::LabelOutOfRange { .. } => "LabelOutOfRange",
            DspError::ZeroSignal => "ZeroSignal",
            DspError::TooLong { .. } => "TooLong",
            DspError::InvalidQubits(_) => "InvalidQubits",
            DspError::InvalidShots(_) => "InvalidShots",
            DspError::ZeroReference => "ZeroReference",
            DspError::UnstableFilter { .. } => "UnstableFilter",
        }
    }
}

pub type Result<T, E = DspError> = std::result::Result<T, E>;
