use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("malformed WAV header in {path}: {reason}")]
    MalformedWav { path: PathBuf, reason: String },
    #[error("unsupported WAV encoding in {path}: {reason}")]
    UnsupportedCodec { path: PathBuf, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid audio buffer: {0}")]
    InvalidBuffer(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },
    #[error("reference signal is all zeros")]
    ZeroReference,
    #[error("empty input: {0}")]
    Empty(String),
    #[error("signal is silent: {0}")]
    Silent(String),
    #[error("unknown clip id: {0}")]
    UnknownClip(String),
    #[error("insufficient pool: {0}")]
    InsufficientPool(String),
    #[error("malformed attenuation curve: {0}")]
    MalformedCurve(String),
    #[error("p-value out of range [0, 1]: {0}")]
    PValueOutOfRange(f64),
    #[error("malformed CSV at row {row}: {reason}")]
    Csv { row: usize, reason: String },
    #[error("objective evaluation failed: {0}")]
    Objective(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}
