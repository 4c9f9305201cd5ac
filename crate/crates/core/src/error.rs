use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error categories. The command-line front end maps each one to a
/// distinct process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Capacity,
    NoCrossing,
    InvalidRegime,
    Domain,
    Io,
    Mismatch,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config | ErrorCategory::Domain => 2,
            ErrorCategory::Capacity => 3,
            ErrorCategory::NoCrossing => 4,
            ErrorCategory::InvalidRegime => 5,
            ErrorCategory::Mismatch => 6,
            ErrorCategory::Io => 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("wrapping curves do not cross in [{lo}, {hi}] (p = {p}): {diagnostics}")]
    NoCrossing {
        p: f64,
        lo: f64,
        hi: f64,
        diagnostics: String,
    },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("golden comparison failed with {count} difference(s)")]
    Mismatch { count: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config { .. } => ErrorCategory::Config,
            Error::Capacity(_) => ErrorCategory::Capacity,
            Error::NoCrossing { .. } => ErrorCategory::NoCrossing,
            Error::InvalidRegime(_) => ErrorCategory::InvalidRegime,
            Error::Domain(_) => ErrorCategory::Domain,
            Error::Mismatch { .. } => ErrorCategory::Mismatch,
            Error::Io { .. } | Error::Serialization(_) => ErrorCategory::Io,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.category().exit_code()
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
