use serde::Serialize;
use thiserror::Error;

/// One point of the wave-speed scan used to bracket the semi-wave root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub k: f64,
    pub residual: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("parameter regime violated: {0}")]
    Regime(String),

    #[error("no sign change found while bracketing the semi-wave speed ({} scan points)", scan.len())]
    Bracketing { scan: Vec<ScanPoint> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("solver instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    #[error("invariant breach at t = {t}: {what}")]
    InvariantBreach { t: f64, what: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("threshold inconclusive in bracket [{lo}, {hi}]")]
    InconclusiveThreshold { lo: f64, hi: f64 },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) | Error::Io(_) => 2,
            Error::InvariantBreach { .. } => 4,
            Error::InconclusiveThreshold { .. } => 5,
            _ => 3,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
