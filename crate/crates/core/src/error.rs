use thiserror::Error;

/// Errors raised while building or running a scenario.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no radio unit covers track position {position_m:.2} m")]
    NoCoverage { position_m: f64 },

    #[error("UE {ue} has no serving radio unit")]
    Unassociated { ue: usize },

    #[error("train center {center_m:.2} m is outside the covered span [{min_m:.2}, {max_m:.2}] m")]
    OutsideCoverage { center_m: f64, min_m: f64, max_m: f64 },
}

/// Errors raised while reading a key=value configuration file.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },

    #[error("line {line}: malformed value for `{key}`: {reason}")]
    Malformed { key: String, line: usize, reason: String },

    #[error("line {line}: value for `{key}` out of range: {reason}")]
    OutOfRange { key: String, line: usize, reason: String },

    #[error("line {line}: expected `key=value`, found `{text}`")]
    Syntax { line: usize, text: String },

    #[error("invalid configuration: {0}")]
    Invalid(#[from] SimError),

    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
