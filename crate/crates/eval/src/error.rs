use std::path::PathBuf;

use recomb_pipeline::PipelineError;
use recomb_providers::ProviderError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type EvalResult<T> = Result<T, EvalError>;
