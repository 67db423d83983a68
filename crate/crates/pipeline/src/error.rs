use recomb_core::CoreError;
use recomb_providers::ProviderError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{stage}: {source}")]
    Provider {
        stage: &'static str,
        #[source]
        source: ProviderError,
    },
    /// The model answered but the answer could not be read. `raw` is kept
    /// for display.
    #[error("{stage}: could not parse the answer: {message}")]
    Parse {
        stage: &'static str,
        message: String,
        raw: String,
    },
    #[error("no draft survived: {}", .0.join("; "))]
    NoDrafts(Vec<String>),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("blob storage: {0}")]
    Storage(#[from] std::io::Error),
}

impl PipelineError {
    pub(crate) fn provider(stage: &'static str) -> impl FnOnce(ProviderError) -> Self {
        move |source| PipelineError::Provider { stage, source }
    }

    pub(crate) fn parse(stage: &'static str, e: CoreError) -> Self {
        match e {
            CoreError::Parse { message, raw } => PipelineError::Parse { stage, message, raw },
            other => PipelineError::Core(other),
        }
    }
}

pub type PipelineResult<T> = std::result::Result<T, PipelineError>;
