use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("index {index} out of range for {len} UAVs")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("link is idle (Γ_D ≤ 1 + 1/Γ_S); optimal SINRs are undefined")]
    IdleLink,

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Quadrature { estimate: f64, error_bound: f64 },

    #[error("non-finite intermediate value in {0}")]
    NonFinite(&'static str),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
