use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// Malformed input row. `line` is 1-based and counts the header.
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: invalid UTF-8")]
    Encoding { line: u64 },

    /// A value outside its domain; `line` is set when the value came from a file.
    #[error("{}{message}", .line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Domain { line: Option<u64>, message: String },

    #[error("rank {rank} out of range 1..={len}")]
    RankOutOfRange { rank: usize, len: usize },

    #[error("agreement undefined: {0}")]
    UndefinedAgreement(String),
}

impl Error {
    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain { line: None, message: message.into() }
    }

    /// True for errors caused by reading or decoding input, as opposed to
    /// analysis errors on well-formed data.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Parse { .. } | Error::Encoding { .. })
    }
}
