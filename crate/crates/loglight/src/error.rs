//! Error taxonomy shared by the codec, the container format, and the CLI.

use std::io;
use thiserror::Error;

/// Everything that can go wrong while encoding, decoding, or validating.
///
/// Every decode failure maps to exactly one variant; I/O failures from the
/// underlying reader or writer are passed through as [`CodecError::Io`].
#[derive(Debug, Error)]
pub enum CodecError {
    /// Input contained a NUL (0x00) byte. NUL is the match sentinel inside
    /// encoded records and can never appear in a log line.
    #[error("NUL byte in input{0}")]
    NulByteInInput(String),

    /// A single line exceeded the maximum encodable length (u32::MAX bytes).
    #[error("line too long: {0} bytes")]
    LineTooLong(u64),

    /// A record was structurally invalid (bad field value, out-of-range
    /// window id, zero-length run, nonzero padding, ...).
    #[error("corrupt record: {0}")]
    CorruptRecord(String),

    /// The stream ended in the middle of a record.
    #[error("truncated stream: {0}")]
    TruncatedStream(String),

    /// The container header was missing, had the wrong magic, or an
    /// unsupported version.
    #[error("bad header: {0}")]
    BadHeader(String),

    /// Codec parameters were outside their valid ranges.
    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    /// Underlying reader/writer failure.
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CodecError {
    /// Short machine-friendly name of the error kind, used in CLI diagnostics.
    pub fn kind_name(&self) -> &'static str {
        match self {
            CodecError::NulByteInInput(_) => "NulByteInInput",
            CodecError::LineTooLong(_) => "LineTooLong",
            CodecError::CorruptRecord(_) => "CorruptRecord",
            CodecError::TruncatedStream(_) => "TruncatedStream",
            CodecError::BadHeader(_) => "BadHeader",
            CodecError::ConfigInvalid(_) => "ConfigInvalid",
            CodecError::Io(_) => "Io",
        }
    }

    /// Maps `UnexpectedEof` from a read inside a record to `TruncatedStream`,
    /// keeping real I/O failures distinct.
    pub(crate) fn from_read(err: io::Error, what: &str) -> CodecError {
        if err.kind() == io::ErrorKind::UnexpectedEof {
            CodecError::TruncatedStream(what.to_string())
        } else {
            CodecError::Io(err)
        }
    }
}

pub type Result<T> = std::result::Result<T, CodecError>;
