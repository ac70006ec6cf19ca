// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("index {index} outside valid range {lo}..={hi}")]
    Index { index: usize, lo: usize, hi: usize },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn index(index: usize, lo: usize, hi: usize) -> Self {
        Error::Index { index, lo, hi }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 2 is a usage error, 3 a data error, 4 a numerical error. Codes 0 and 1
    /// are reserved for the retain/reject decision of `amoc test`.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Model(_) | Error::Domain(_) | Error::Index { .. } => 2,
            Error::InvalidData(_)
            | Error::DegenerateData(_)
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 3,
            Error::Numerical(_) => 4,
        }
    }
}
