use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected parameters: {0}")]
    RejectedParameters(String),

    #[error("{what} too large for exhaustive search: {count} exceeds cap {cap}")]
    TooLarge { what: &'static str, count: u128, cap: u128 },

    #[error("iterate diverged at iteration {iteration} (norm {norm:e})")]
    Divergence { iteration: usize, norm: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn rejected(msg: impl Into<String>) -> Error {
    Error::RejectedParameters(msg.into())
}
