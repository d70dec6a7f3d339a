use thiserror::Error;

use crate::derivation::DerivationError;
use crate::expand::ExpandError;
use crate::mizar::{ArticleError, ManifestError};
use crate::skolem::SkolemError;
use crate::tptp::TptpError;

/// Any failure of the translation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Tptp(#[from] TptpError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Skolem(#[from] SkolemError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Article(#[from] ArticleError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable name used in `error: <Kind>: <detail>` lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Tptp(e) => e.kind(),
            Error::Derivation(e) => e.kind(),
            Error::Skolem(e) => e.kind(),
            Error::Expand(e) => e.kind(),
            Error::Article(e) => e.kind(),
            Error::Manifest(_) => "ManifestError",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Error {
        Error::Io { path: path.display().to_string(), message: e.to_string() }
    }
}
