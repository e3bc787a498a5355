use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] depthedge::Error),
    #[error(transparent)]
    Annotate(#[from] depthedge_annotate::AnnotateError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
