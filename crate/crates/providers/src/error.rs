use thiserror::Error;

/// Failure of a provider call. Every variant is safe to retry; only some are
/// worth retrying.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    #[error("{provider} timed out after {timeout_ms} ms")]
    Timeout { provider: String, timeout_ms: u64 },
    /// `status` is the HTTP status, or 0 when no response arrived.
    #[error("{provider} failed with status {status}: {message}")]
    Remote {
        provider: String,
        status: u16,
        message: String,
    },
    #[error("image could not be decoded: {0}")]
    UndecodableImage(String),
    #[error("{0} returned an empty response")]
    EmptyResponse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl ProviderError {
    pub fn remote(provider: impl Into<String>, status: u16, message: impl Into<String>) -> Self {
        ProviderError::Remote {
            provider: provider.into(),
            status,
            message: message.into(),
        }
    }

    /// Transient failures: timeouts, connection errors, 408, 429 and 5xx.
    pub fn is_retryable(&self) -> bool {
        match self {
            ProviderError::Timeout { .. } | ProviderError::EmptyResponse(_) => true,
            ProviderError::Remote { status, .. } => {
                *status == 0 || *status == 408 || *status == 429 || *status >= 500
            }
            ProviderError::UndecodableImage(_) | ProviderError::InvalidInput(_) => false,
        }
    }
}

pub type ProviderResult<T> = std::result::Result<T, ProviderError>;
