use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("unknown item {0:?}")]
    UnknownItem(String),
    #[error("invalid edit: {0}")]
    InvalidEdit(String),
    #[error("item {0:?} is being edited by another request")]
    Conflict(String),
    #[error("item {0:?} has no depth attached")]
    NoDepth(String),
    #[error("invalid probe: {0}")]
    InvalidProbe(String),
    #[error("nothing to export: no item is marked done")]
    NothingToExport,
    #[error("bad session manifest: {0}")]
    Manifest(String),
    #[error("corrupt journal {path}: {msg}")]
    Journal { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] depthedge::Error),
}

pub type Result<T, E = AnnotateError> = std::result::Result<T, E>;
