use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: bad lengths, indices out of range, etc.
    #[error("invalid input: {0}")]
    Input(String),
    /// Functions outside the constant/balanced promise the algorithms rely on.
    #[error("promise violation: {0}")]
    Promise(String),
    /// An outcome probability that should be exactly 0 or 1 was neither.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
