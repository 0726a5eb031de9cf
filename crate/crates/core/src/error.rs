use thiserror::Error;

/// Errors produced by the library and surfaced through the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("derivative of order {order} is not supported for {kind}")]
    UnsupportedDerivative { kind: &'static str, order: usize },
    #[error("accuracy: {msg} (achieved delta {delta:.3e})")]
    Accuracy { msg: String, delta: f64 },
    #[error("parse: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 config/domain/parse, 3 accuracy, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Domain(_)
            | Error::UnsupportedDerivative { .. }
            | Error::Parse(_) => 2,
            Error::Accuracy { .. } => 3,
            Error::Io(_) => 4,
        }
    }
}

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
