use std::path::PathBuf;

use thiserror::Error;

use crate::friction::LimitEllipse;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero sliding velocity has no maximum-dissipation direction")]
    ZeroVelocity,

    #[error("non-finite wrench ({0:?})")]
    NonFiniteWrench([f64; 3]),

    #[error("{phase} did not come to rest within {cap_s} s (speed {speed:.3e} m/s, spin {spin:.3e} rad/s)")]
    NotConverged {
        phase: &'static str,
        cap_s: f64,
        speed: f64,
        spin: f64,
    },

    #[error("rank-deficient least-squares design: {0}")]
    RankDeficient(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("fitted ellipse violates dissipativity (origin outside): {0:?}")]
    NotDissipative(LimitEllipse),

    #[error("cycle map is the identity at every sample; fixed points are not isolated")]
    IdentityMap,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error stems from user input (config, files, arguments)
    /// rather than from a numerical or simulation failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Config(_) | Error::Input { .. } | Error::Io(_) | Error::Csv(_)
        )
    }
}
