//! Error taxonomy shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes a caller can observe.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Tensor shapes do not conform for the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The caller violated an API precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// An input file or corpus is malformed. Carries `file:line` context
    /// where available.
    #[error("data error: {0}")]
    Data(String),

    /// Training hit a non-finite loss or gradient.
    #[error("training error: {0}")]
    Training(String),

    /// A persisted model file is unreadable or inconsistent.
    #[error("corrupt model file: {0}")]
    Corrupt(String),

    /// A persisted model file uses an unsupported format version.
    #[error("model format version {found} not supported (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Data error with a `file:line` prefix, for parser diagnostics.
    pub fn data_at(file: &str, line: usize, msg: impl std::fmt::Display) -> Self {
        Error::Data(format!("{file}:{line}: {msg}"))
    }

    /// Process exit code for the CLI: 2 for caller mistakes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Dimension(_) => 2,
            _ => 1,
        }
    }
}
