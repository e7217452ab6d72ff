//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Bounded-retry graph construction gave up.
    #[error("construction failed: {0}")]
    ConstructionFailure(String),

    /// Malformed binary input (IDX files, model checkpoints).
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// Non-finite values showed up during simulation or training.
    #[error("numerical failure at round {round}, client {client}: {message}")]
    Numerical {
        round: usize,
        client: usize,
        message: String,
    },

    /// Config file problems; maps to exit code 2 in the CLI.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Wrap a parser error (e.g. TOML) as a config error, keeping its
    /// field/line diagnostics.
    pub fn config_from(err: impl std::fmt::Display) -> Self {
        Error::Config(err.to_string())
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 1,
        }
    }
}
