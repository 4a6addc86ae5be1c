// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised across the detection pipeline and the simulation harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CpError {
    #[error("series is empty")]
    EmptySeries,
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("range [{start}, {end}] is outside 1..={n}")]
    OutOfRange { start: usize, end: usize, n: usize },
    #[error("width {w} is too small for degree {p}: each of the {chunks} chunks would be empty")]
    InvalidScale { w: usize, p: usize, chunks: usize },
    #[error("degree {0} is not supported (max {max})", max = crate::kernel::MAX_DEGREE)]
    UnsupportedDegree(usize),
    #[error("no admissible scales: n = {n} is smaller than twice the minimum scale {min_scale}")]
    EmptyScaleSet { n: usize, min_scale: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("series of length {n} is too short: need at least {needed}")]
    TooShort { n: usize, needed: usize },
    #[error("series length {n} is below the supported minimum of {min} for threshold calibration")]
    SmallSample { n: usize, min: usize },
    #[error("estimated noise scale is zero; the input is an exact polynomial of the tested degree")]
    DegenerateScale,
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("io error on {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CpError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        CpError::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            CpError::EmptySeries => "empty_series",
            CpError::NonFinite { .. } => "non_finite",
            CpError::OutOfRange { .. } => "out_of_range",
            CpError::InvalidScale { .. } => "invalid_scale",
            CpError::UnsupportedDegree(_) => "unsupported_degree",
            CpError::EmptyScaleSet { .. } => "empty_scale_set",
            CpError::Parameter { .. } => "parameter",
            CpError::TooShort { .. } => "too_short",
            CpError::SmallSample { .. } => "small_sample",
            CpError::DegenerateScale => "degenerate_scale",
            CpError::Parse { .. } => "parse",
            CpError::Io { .. } => "io",
            CpError::Config(_) => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, CpError>;
