use thiserror::Error;

/// Stable numeric error codes shared by the CLI exit path and the C ABI.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Ok = 0,
    Domain = 1,
    Sampling = 2,
    Contract = 3,
    Alignment = 4,
    Parse = 5,
    Config = 6,
    Numerical = 7,
    Io = 8,
    Serialization = 9,
}

impl ErrorCode {
    /// Short machine-parseable tag, e.g. `E_DOMAIN`.
    pub fn tag(self) -> &'static str {
        match self {
            ErrorCode::Ok => "OK",
            ErrorCode::Domain => "E_DOMAIN",
            ErrorCode::Sampling => "E_SAMPLING",
            ErrorCode::Contract => "E_CONTRACT",
            ErrorCode::Alignment => "E_ALIGNMENT",
            ErrorCode::Parse => "E_PARSE",
            ErrorCode::Config => "E_CONFIG",
            ErrorCode::Numerical => "E_NUMERICAL",
            ErrorCode::Io => "E_IO",
            ErrorCode::Serialization => "E_SERDE",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    /// A caller broke a structural precondition (shapes, empty sets, regions).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn code(&self) -> ErrorCode {
        match self {
            Error::Domain(_) => ErrorCode::Domain,
            Error::Sampling(_) => ErrorCode::Sampling,
            Error::Contract(_) => ErrorCode::Contract,
            Error::Alignment(_) => ErrorCode::Alignment,
            Error::Parse { .. } => ErrorCode::Parse,
            Error::Config(_) => ErrorCode::Config,
            Error::Numerical(_) => ErrorCode::Numerical,
            Error::Io(_) => ErrorCode::Io,
            Error::Json(_) | Error::Csv(_) => ErrorCode::Serialization,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
